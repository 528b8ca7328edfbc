#ifndef FRACDIM_DIMENSION_HPP
#define FRACDIM_DIMENSION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "paircount.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace fracdim {

/// Least-squares line through (log r, log C(r)).
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points_used = 0;
};

/// Fits log C against log r over the radii with a nonzero count.
///
/// Counts enter the fit as log(C_k / C_ref), with C_ref the first nonzero
/// count; the intercept is shifted back afterwards. The ratio of two exact
/// integers is correctly rounded, so multiplying every count by a common
/// integer leaves slope and r_squared bit-identical.
inline LogLogFit fit_loglog(const PairCountCurve& curve) {
    if (curve.radii.size() != curve.counts.size()) {
        fail(ErrorCode::InvalidArgument, "curve radii and counts differ in length");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    double reference = 0.0;
    for (std::size_t k = 0; k < curve.counts.size(); ++k) {
        if (curve.counts[k] == 0) continue;
        const double c = static_cast<double>(curve.counts[k]);
        if (reference == 0.0) reference = c;
        xs.push_back(std::log(curve.radii[k]));
        ys.push_back(std::log(c / reference));
    }
    if (xs.size() < 2) {
        fail(ErrorCode::InsufficientNonzeroCounts, "need at least 2 radii with a nonzero count, got " +
                                                       std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        x_mean += xs[k];
        y_mean += ys[k];
    }
    x_mean /= n;
    y_mean /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double dx = xs[k] - x_mean;
        const double dy = ys[k] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LogLogFit fit;
    fit.points_used = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = (y_mean - fit.slope * x_mean) + std::log(reference);
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    return fit;
}

struct DimensionConfig {
    std::size_t num_batches = 100;
    std::size_t batch_size = 128;
    RadiusSet radius_set;
    PairMode mode = PairMode::CrossClass;
    std::size_t threads = 1;
};

struct BatchFit {
    std::size_t batch_index = 0;
    LogLogFit fit;
    std::vector<std::uint64_t> counts;
};

struct DimensionEstimate {
    double mean_slope = 0.0;
    double slope_std = 0.0;
    std::vector<BatchFit> per_batch;
    std::size_t batches_requested = 0;
    std::size_t batches_valid = 0;
    std::size_t no_cross_pairs = 0;
    std::size_t insufficient_counts = 0;
    std::vector<double> radii;

    /// Mean pair count per radius over the valid batches.
    std::vector<double> mean_counts() const {
        std::vector<double> out(radii.size(), 0.0);
        if (per_batch.empty()) return out;
        for (const auto& b : per_batch) {
            for (std::size_t k = 0; k < out.size(); ++k) out[k] += static_cast<double>(b.counts[k]);
        }
        for (double& v : out) v /= static_cast<double>(per_batch.size());
        return out;
    }
};

using PointSetProvider = std::function<PointSet(std::size_t batch_index)>;

/// Fits every batch, recording batches without cross-class pairs or with too
/// few nonzero counts as invalid. No validity threshold is applied.
inline DimensionEstimate summarize_batches(const PointSetProvider& provider, const DimensionConfig& config) {
    if (config.num_batches == 0) fail(ErrorCode::InvalidArgument, "num_batches must be positive");
    if (config.radius_set.num_scales() < 2) fail(ErrorCode::InvalidArgument, "radius set needs at least 2 scales");

    struct Slot {
        std::optional<BatchFit> fit;
        ErrorCode failure = ErrorCode::InvalidArgument;
    };
    std::vector<Slot> slots(config.num_batches);
    parallel_for(config.num_batches, config.threads, [&](std::size_t b) {
        const PointSet points = provider(b);
        try {
            PairCountCurve curve = count_pairs(points, config.radius_set, config.mode);
            LogLogFit fit = fit_loglog(curve);
            slots[b].fit = BatchFit{b, fit, std::move(curve.counts)};
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoCrossPairs && e.code() != ErrorCode::InsufficientNonzeroCounts) throw;
            slots[b].failure = e.code();
        }
    });

    DimensionEstimate est;
    est.batches_requested = config.num_batches;
    est.radii = config.radius_set.radii;
    for (auto& slot : slots) {
        if (slot.fit) {
            est.per_batch.push_back(std::move(*slot.fit));
        } else if (slot.failure == ErrorCode::NoCrossPairs) {
            ++est.no_cross_pairs;
        } else {
            ++est.insufficient_counts;
        }
    }
    est.batches_valid = est.per_batch.size();
    if (est.batches_valid == 0) return est;
    double sum = 0.0;
    for (const auto& b : est.per_batch) sum += b.fit.slope;
    est.mean_slope = sum / static_cast<double>(est.batches_valid);
    if (est.batches_valid > 1) {
        double ss = 0.0;
        for (const auto& b : est.per_batch) ss += (b.fit.slope - est.mean_slope) * (b.fit.slope - est.mean_slope);
        est.slope_std = std::sqrt(ss / static_cast<double>(est.batches_valid - 1));
    }
    return est;
}

/// Mean of the per-batch slopes. Rejected unless at least
/// ceil(num_batches / 2) batches produce a fit.
inline DimensionEstimate estimate_dimension(const PointSetProvider& provider, const DimensionConfig& config) {
    DimensionEstimate est = summarize_batches(provider, config);
    const std::size_t required = (config.num_batches + 1) / 2;
    if (est.batches_valid < required) {
        fail(ErrorCode::TooManyInvalidBatches,
             std::to_string(est.batches_valid) + " of " + std::to_string(config.num_batches) +
                 " batches produced a fit (" + std::to_string(required) + " required; " +
                 std::to_string(est.no_cross_pairs) + " without cross-class pairs, " +
                 std::to_string(est.insufficient_counts) + " with too few nonzero counts)");
    }
    return est;
}

/// Batch b of a run: seeded by (seed, b) so it is the same whichever pass
/// or worker draws it.
inline Batch draw_batch(const Dataset& dataset, std::size_t batch_size, RngSeed seed, std::size_t batch_index) {
    Rng rng(derive_seed(seed, Stream::Batch, batch_index));
    return sample_batch(dataset, batch_size, rng);
}

/// Labels assigned to a batch; the default uses the dataset labels.
using Labeler = std::function<std::vector<Label>(const Batch&)>;

inline void require_batch_fits(const Dataset& dataset, std::size_t batch_size) {
    if (batch_size < 2) fail(ErrorCode::BatchTooSmall, "batch size must be at least 2");
    if (batch_size > dataset.size()) {
        fail(ErrorCode::BatchTooLarge, "batch size " + std::to_string(batch_size) + " exceeds dataset size " +
                                           std::to_string(dataset.size()));
    }
}

/// Batch b drawn from (seed, b), labeled by `labeler` (dataset labels when empty).
inline PointSetProvider batch_provider(const Dataset& dataset, const Labeler& labeler, std::size_t batch_size,
                                       RngSeed seed) {
    return [&dataset, labeler, batch_size, seed](std::size_t b) {
        Batch batch = draw_batch(dataset, batch_size, seed, b);
        std::vector<Label> labels = labeler ? labeler(batch) : batch.labels;
        if (labels.size() != batch.size()) fail(ErrorCode::ClassifierError, "labeler returned wrong label count");
        return PointSet{std::move(batch.features), std::move(labels)};
    };
}

inline DimensionEstimate estimate_dimension(const Dataset& dataset, const Labeler& labeler,
                                            const DimensionConfig& config, RngSeed seed) {
    require_batch_fits(dataset, config.batch_size);
    return estimate_dimension(batch_provider(dataset, labeler, config.batch_size, seed), config);
}

inline DimensionEstimate estimate_dimension(const Dataset& dataset, const DimensionConfig& config, RngSeed seed) {
    return estimate_dimension(dataset, Labeler{}, config, seed);
}

}  // namespace fracdim

#endif
