#ifndef FRACDIM_MEASURE_HPP
#define FRACDIM_MEASURE_HPP

#include <cmath>
#include <string>

#include "classifier.hpp"
#include "dataset.hpp"
#include "dimension.hpp"
#include "error.hpp"
#include "mixup.hpp"
#include "paircount.hpp"
#include "random.hpp"

namespace fracdim {

/// Estimator settings. Defaults: 100 batches of 128, radii between the 1%
/// and 30% distance quantiles, 20 scales.
struct MeasureConfig {
    std::size_t num_batches = 100;
    std::size_t batch_size = 128;
    double percentile_lo = 0.01;
    double percentile_hi = 0.3;
    std::size_t num_scales = 20;
    MixupConfig mixup;
    RngSeed seed;
    std::size_t threads = 1;
    std::size_t pilot_pairs = 200'000;

    void validate() const {
        if (num_batches == 0) fail(ErrorCode::InvalidArgument, "num_batches must be positive");
        if (batch_size < 2) fail(ErrorCode::BatchTooSmall, "batch size must be at least 2");
        validate_percentiles(percentile_lo, percentile_hi);
        if (num_scales < 2) fail(ErrorCode::InvalidArgument, "num_scales must be at least 2");
        if (pilot_pairs < 2) fail(ErrorCode::InvalidArgument, "pilot sample needs at least 2 pairs");
        mixup.lambda.validate();
    }
};

struct MeasureResult {
    DimensionEstimate d2_data;
    DimensionEstimate d2_mixup;
    double m = 0.0;
    RadiusSet radius_set;
};

/// |1 - d2_mixup / d2_data|.
inline double measure_from_dimensions(double d2_mixup, double d2_data) {
    if (d2_data == 0.0) fail(ErrorCode::DegenerateBaseDimension, "training-data dimension is zero");
    return std::abs(1.0 - d2_mixup / d2_data);
}

/// Radius set shared by every batch of both passes, placed from raw-data distances.
inline RadiusSet measure_radius_set(const Dataset& dataset, double percentile_lo, double percentile_hi,
                                    std::size_t num_scales, RngSeed seed, std::size_t pilot_pairs = 200'000) {
    return derive_radius_set(pilot_distances(dataset, seed, pilot_pairs), percentile_lo, percentile_hi, num_scales);
}

/// Dimension of the mixup-augmented, model-labeled class boundary. Batch b
/// holds the same real points as batch b of the true-label pass.
inline DimensionEstimate estimate_mixup_dimension(const Dataset& dataset, const Classifier& classifier,
                                                  const MixupConfig& mixup, const DimensionConfig& config,
                                                  RngSeed seed) {
    require_batch_fits(dataset, config.batch_size);
    return estimate_dimension(
        [&](std::size_t b) {
            const Batch batch = draw_batch(dataset, config.batch_size, seed, b);
            Rng rng(derive_seed(seed, Stream::Mixup, b));
            return augment_batch(batch, classifier, mixup, rng).points;
        },
        config);
}

inline MeasureResult compute_measure(const Dataset& dataset, const Classifier& classifier,
                                     const MeasureConfig& config) {
    config.validate();
    if (classifier.input_dim() != dataset.dim()) {
        fail(ErrorCode::DimensionMismatch, "classifier expects dimension " + std::to_string(classifier.input_dim()) +
                                               ", dataset has " + std::to_string(dataset.dim()));
    }
    require_batch_fits(dataset, config.batch_size);

    MeasureResult result;
    result.radius_set = measure_radius_set(dataset, config.percentile_lo, config.percentile_hi, config.num_scales,
                                           config.seed, config.pilot_pairs);
    DimensionConfig dim_config;
    dim_config.num_batches = config.num_batches;
    dim_config.batch_size = config.batch_size;
    dim_config.radius_set = result.radius_set;
    dim_config.mode = PairMode::CrossClass;
    dim_config.threads = config.threads;

    result.d2_data = estimate_dimension(dataset, dim_config, config.seed);
    if (result.d2_data.mean_slope == 0.0) {
        fail(ErrorCode::DegenerateBaseDimension, "training-data class-boundary dimension is zero");
    }
    result.d2_mixup = estimate_mixup_dimension(dataset, classifier, config.mixup, dim_config, config.seed);
    result.m = measure_from_dimensions(result.d2_mixup.mean_slope, result.d2_data.mean_slope);
    return result;
}

}  // namespace fracdim

#endif
