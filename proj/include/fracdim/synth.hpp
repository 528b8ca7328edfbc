#ifndef FRACDIM_SYNTH_HPP
#define FRACDIM_SYNTH_HPP

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "random.hpp"

namespace fracdim {

// Generators for point sets of known dimension and for simple two-class
// geometries. All outputs lie in the unit hypercube.

inline constexpr std::size_t kSierpinskiBurnIn = 100;
inline constexpr std::size_t kCantorDigits = 40;

inline Dataset gen_sierpinski(std::size_t n, RngSeed seed) {
    static const std::array<std::array<double, 2>, 3> vertices{{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}};
    Rng rng(derive_seed(seed, Stream::Synth));
    // Random start inside the triangle (reflected barycentric draw).
    double a = rng.uniform01(), b = rng.uniform01();
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    double x = a * vertices[1][0] + b * vertices[2][0];
    double y = a * vertices[1][1] + b * vertices[2][1];
    std::vector<double> values;
    values.reserve(2 * n);
    for (std::size_t t = 0; t < n + kSierpinskiBurnIn; ++t) {
        const auto& v = vertices[rng.uniform_index(3)];
        x = (x + v[0]) / 2.0;
        y = (y + v[1]) / 2.0;
        if (t >= kSierpinskiBurnIn) {
            values.push_back(x);
            values.push_back(y);
        }
    }
    return Dataset(Matrix(n, 2, std::move(values)), std::vector<Label>(n, 0));
}

/// Ternary digits (each 0 or 2) of one Cantor-dust point, most significant first.
inline std::array<int, kCantorDigits> cantor_digits(Rng& rng) {
    std::array<int, kCantorDigits> digits{};
    const std::uint64_t bits = rng.next_u64();
    for (std::size_t k = 0; k < kCantorDigits; ++k) digits[k] = ((bits >> k) & 1u) ? 2 : 0;
    return digits;
}

inline double cantor_value(const std::array<int, kCantorDigits>& digits) {
    double x = 0.0;
    for (std::size_t k = kCantorDigits; k-- > 0;) x = (x + digits[k]) / 3.0;
    return x;
}

inline Dataset gen_cantor_dust(std::size_t n, RngSeed seed) {
    Rng rng(derive_seed(seed, Stream::Synth));
    std::vector<double> values(n);
    for (auto& v : values) v = cantor_value(cantor_digits(rng));
    return Dataset(Matrix(n, 1, std::move(values)), std::vector<Label>(n, 0));
}

inline Matrix uniform_points(std::size_t n, std::size_t dim, Rng& rng) {
    Matrix m(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : m.row(i)) v = rng.uniform01();
    }
    return m;
}

inline Dataset gen_uniform_cube(std::size_t n, std::size_t dim, RngSeed seed) {
    if (dim < 1 || dim > 10) fail(ErrorCode::InvalidArgument, "uniform_cube dim must be in 1..10");
    Rng rng(derive_seed(seed, Stream::Synth));
    return Dataset(uniform_points(n, dim, rng), std::vector<Label>(n, 0));
}

inline Label two_class_linear_label(std::span<const double> x) { return x[0] > 0.5 ? 1 : 0; }

inline Dataset gen_two_class_linear(std::size_t n, std::size_t dim, RngSeed seed) {
    if (dim < 1) fail(ErrorCode::InvalidArgument, "two_class_linear dim must be at least 1");
    Rng rng(derive_seed(seed, Stream::Synth));
    Matrix m = uniform_points(n, dim, rng);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = two_class_linear_label(m.row(i));
    return Dataset(std::move(m), std::move(labels), 2);
}

inline constexpr double kCircleRadius = 0.3;

inline Label two_class_circle_label(std::span<const double> x) {
    const double dx = x[0] - 0.5, dy = x[1] - 0.5;
    return std::sqrt(dx * dx + dy * dy) < kCircleRadius ? 1 : 0;
}

inline Dataset gen_two_class_circle(std::size_t n, RngSeed seed) {
    Rng rng(derive_seed(seed, Stream::Synth));
    Matrix m = uniform_points(n, 2, rng);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = two_class_circle_label(m.row(i));
    return Dataset(std::move(m), std::move(labels), 2);
}

enum class SynthKind { Sierpinski, CantorDust, UniformCube, TwoClassLinear, TwoClassCircle };

inline constexpr std::array<std::string_view, 5> kSynthKindNames{"sierpinski", "cantor_dust", "uniform_cube",
                                                                 "two_class_linear", "two_class_circle"};

inline SynthKind parse_synth_kind(std::string_view name) {
    for (std::size_t k = 0; k < kSynthKindNames.size(); ++k) {
        if (kSynthKindNames[k] == name) return static_cast<SynthKind>(k);
    }
    std::string valid;
    for (auto v : kSynthKindNames) valid += (valid.empty() ? "" : ", ") + std::string(v);
    fail(ErrorCode::InvalidArgument, "unknown synth kind '" + std::string(name) + "' (valid: " + valid + ")");
}

struct SynthSpec {
    SynthKind kind = SynthKind::Sierpinski;
    std::size_t n = 1000;
    std::size_t dim = 2;  // uniform_cube and two_class_linear only
    RngSeed seed;
};

inline Dataset generate(const SynthSpec& spec) {
    if (spec.n < 2) fail(ErrorCode::InvalidArgument, "synthetic datasets need n >= 2");
    switch (spec.kind) {
        case SynthKind::Sierpinski: return gen_sierpinski(spec.n, spec.seed);
        case SynthKind::CantorDust: return gen_cantor_dust(spec.n, spec.seed);
        case SynthKind::UniformCube: return gen_uniform_cube(spec.n, spec.dim, spec.seed);
        case SynthKind::TwoClassLinear: return gen_two_class_linear(spec.n, spec.dim, spec.seed);
        case SynthKind::TwoClassCircle: return gen_two_class_circle(spec.n, spec.seed);
    }
    fail(ErrorCode::InvalidArgument, "unknown synth kind");
}

}  // namespace fracdim

#endif
