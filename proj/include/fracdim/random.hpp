#ifndef FRACDIM_RANDOM_HPP
#define FRACDIM_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "error.hpp"

namespace fracdim {

/// Strong type for a run seed.
struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent sub-streams of a run seed. Every randomized step draws from
/// its own (purpose, index) stream so results never depend on the order in
/// which work items are processed.
enum class Stream : std::uint64_t {
    Batch = 1,
    Pilot = 2,
    Mixup = 3,
    Synth = 4,
    Generic = 5,
};

constexpr RngSeed derive_seed(RngSeed seed, Stream stream, std::uint64_t index = 0) noexcept {
    std::uint64_t h = splitmix64(seed.value ^ splitmix64(static_cast<std::uint64_t>(stream)));
    return RngSeed{splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

/// Random stream with platform-independent draws. The engine output is fixed
/// by the standard; the distributions below are implemented here because the
/// standard library's distributions are implementation-defined.
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed.value) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform01_open_low() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection (unbiased).
    std::uint64_t uniform_index(std::uint64_t bound) {
        if (bound == 0) fail(ErrorCode::InvalidArgument, "uniform_index bound must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal (Marsaglia polar method, one value per call).
    double normal() {
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, with the shape<1 boost.
    double gamma(double shape) {
        if (!(shape > 0.0)) fail(ErrorCode::InvalidArgument, "gamma shape must be positive");
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform01_open_low(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open_low();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as a ratio of gammas.
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        if (x + y == 0.0) return uniform01() < a / (a + b) ? 1.0 : 0.0;
        return x / (x + y);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fracdim

#endif
