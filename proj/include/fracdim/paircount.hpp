#ifndef FRACDIM_PAIRCOUNT_HPP
#define FRACDIM_PAIRCOUNT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "random.hpp"

/**
 * @file paircount.hpp
 *
 * @brief Pairwise distances, percentile-derived radius sets and the pair-count curve C(r).
 */

namespace fracdim {

enum class PairMode { CrossClass, AllPairs };

inline std::string to_string(PairMode mode) { return mode == PairMode::CrossClass ? "cross_class" : "all_pairs"; }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

/// Condensed L2 distances for pairs i<j, ordered (0,1), (0,2), ..., (1,2), ...
inline std::vector<double> pairwise_distances(const Matrix& features) {
    const std::size_t m = features.rows();
    if (m < 2) fail(ErrorCode::BatchTooSmall, "pairwise distances need at least 2 points");
    require_finite(features);
    std::vector<double> out;
    out.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i) {
        const auto xi = features.row(i);
        for (std::size_t j = i + 1; j < m; ++j) out.push_back(euclidean_distance(xi, features.row(j)));
    }
    return out;
}

/// Strictly increasing distance scales at which pairs are counted.
struct RadiusSet {
    std::vector<double> radii;
    double percentile_lo = 0.0;
    double percentile_hi = 0.0;

    std::size_t num_scales() const noexcept { return radii.size(); }
    double r_min() const { return radii.front(); }
    double r_max() const { return radii.back(); }

    /// Same percentiles, every radius multiplied by factor.
    RadiusSet scaled(double factor) const {
        RadiusSet out = *this;
        for (double& r : out.radii) r *= factor;
        return out;
    }
};

/// Nearest-rank quantile: the ceil(p*N)-th smallest value of a sorted sample.
/// p*N within 1e-9 of an integer is snapped to it so that e.g. 0.3*N does not
/// jump a rank through representation error.
inline double nearest_rank(std::span<const double> sorted, double p) {
    const double n = static_cast<double>(sorted.size());
    const double pos = p * n;
    const double snapped = std::round(pos);
    double rank = std::abs(pos - snapped) < 1e-9 ? snapped : std::ceil(pos);
    rank = std::clamp(rank, 1.0, n);
    return sorted[static_cast<std::size_t>(rank) - 1];
}

inline void validate_percentiles(double lo, double hi) {
    if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
        fail(ErrorCode::InvalidArgument, "percentiles must satisfy 0 < lo < hi < 1");
    }
}

/// Log-spaced radii between the lo and hi nearest-rank quantiles of a
/// distance sample.
inline RadiusSet derive_radius_set(std::vector<double> distances, double percentile_lo, double percentile_hi,
                                   std::size_t num_scales) {
    validate_percentiles(percentile_lo, percentile_hi);
    if (num_scales < 2) fail(ErrorCode::InvalidArgument, "num_scales must be at least 2");
    for (double d : distances) {
        if (!std::isfinite(d) || d < 0.0) fail(ErrorCode::NonFiniteInput, "distance sample must be finite and >= 0");
    }
    std::sort(distances.begin(), distances.end());
    std::size_t distinct_positive = 0;
    for (std::size_t k = 0; k < distances.size() && distinct_positive < num_scales; ++k) {
        if (distances[k] > 0.0 && (k == 0 || distances[k] != distances[k - 1])) ++distinct_positive;
    }
    if (distinct_positive < num_scales) {
        fail(ErrorCode::DegenerateScale, "distance sample has fewer than " + std::to_string(num_scales) +
                                             " distinct positive values");
    }
    const double r_min = nearest_rank(distances, percentile_lo);
    const double r_max = nearest_rank(distances, percentile_hi);
    if (r_min == 0.0) fail(ErrorCode::DegenerateScale, "lower quantile distance is zero (duplicate points dominate)");
    if (r_min == r_max) fail(ErrorCode::DegenerateScale, "lower and upper quantile distances coincide");

    RadiusSet set;
    set.percentile_lo = percentile_lo;
    set.percentile_hi = percentile_hi;
    set.radii.resize(num_scales);
    const double log_lo = std::log(r_min);
    const double log_hi = std::log(r_max);
    const double steps = static_cast<double>(num_scales - 1);
    for (std::size_t k = 0; k < num_scales; ++k) {
        set.radii[k] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) / steps);
    }
    set.radii.front() = r_min;
    set.radii.back() = r_max;
    for (std::size_t k = 1; k < num_scales; ++k) {
        if (!(set.radii[k] > set.radii[k - 1])) {
            fail(ErrorCode::DegenerateScale, "quantile range too narrow for the requested number of scales");
        }
    }
    return set;
}

/// Distance sample used to place the radius set: every pair when the dataset
/// has at most max_pairs of them, otherwise max_pairs uniformly drawn pairs of
/// distinct points.
inline std::vector<double> pilot_distances(const Dataset& dataset, RngSeed seed, std::size_t max_pairs = 200'000) {
    const std::size_t n = dataset.size();
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (total <= max_pairs) return pairwise_distances(dataset.features());
    Rng rng(derive_seed(seed, Stream::Pilot));
    std::vector<double> out;
    out.reserve(max_pairs);
    for (std::size_t k = 0; k < max_pairs; ++k) {
        const auto i = static_cast<std::size_t>(rng.uniform_index(n));
        auto j = static_cast<std::size_t>(rng.uniform_index(n - 1));
        if (j >= i) ++j;
        out.push_back(euclidean_distance(dataset.point(i), dataset.point(j)));
    }
    return out;
}

struct PairCountCurve {
    std::vector<double> radii;
    std::vector<std::uint64_t> counts;
    PairMode mode = PairMode::AllPairs;
};

/// counts[k] = #{i<j : dist(i,j) <= radii[k]} (cross-class pairs only in
/// CrossClass mode).
inline PairCountCurve count_pairs(const Matrix& features, std::span<const Label> labels, const RadiusSet& radius_set,
                                  PairMode mode) {
    const std::size_t m = features.rows();
    if (m < 2) fail(ErrorCode::BatchTooSmall, "pair counting needs at least 2 points");
    if (labels.size() != m) fail(ErrorCode::DimensionMismatch, "label count does not match point count");
    if (radius_set.radii.empty()) fail(ErrorCode::InvalidArgument, "empty radius set");
    if (mode == PairMode::CrossClass) {
        const bool any_cross = std::any_of(labels.begin(), labels.end(), [&](Label l) { return l != labels[0]; });
        if (!any_cross) fail(ErrorCode::NoCrossPairs, "batch contains a single class");
    }

    const auto& radii = radius_set.radii;
    const std::size_t k_count = radii.size();
    // hist[k] = pairs whose smallest enclosing radius index is k; k_count means none.
    std::vector<std::uint64_t> hist(k_count + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto xi = features.row(i);
        for (std::size_t j = i + 1; j < m; ++j) {
            if (mode == PairMode::CrossClass && labels[i] == labels[j]) continue;
            const double d = euclidean_distance(xi, features.row(j));
            if (!std::isfinite(d)) fail(ErrorCode::NonFiniteInput, "non-finite distance");
            const auto it = std::lower_bound(radii.begin(), radii.end(), d);
            ++hist[static_cast<std::size_t>(it - radii.begin())];
        }
    }
    PairCountCurve curve;
    curve.radii = radii;
    curve.mode = mode;
    curve.counts.resize(k_count);
    std::uint64_t running = 0;
    for (std::size_t k = 0; k < k_count; ++k) {
        running += hist[k];
        curve.counts[k] = running;
    }
    return curve;
}

inline PairCountCurve count_pairs(const PointSet& points, const RadiusSet& radius_set, PairMode mode) {
    return count_pairs(points.features, points.labels, radius_set, mode);
}

/// "r,count" CSV for log-log plotting.
inline std::string format_curve_csv(const PairCountCurve& curve) {
    std::string out = "r,count\n";
    for (std::size_t k = 0; k < curve.radii.size(); ++k) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g,%llu\n", curve.radii[k], static_cast<unsigned long long>(curve.counts[k]));
        out += buf;
    }
    return out;
}

}  // namespace fracdim

#endif
