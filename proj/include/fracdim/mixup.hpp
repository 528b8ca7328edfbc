#ifndef FRACDIM_MIXUP_HPP
#define FRACDIM_MIXUP_HPP

#include <algorithm>
#include <exception>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "classifier.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "random.hpp"

namespace fracdim {

/// lambda * x1 + (1 - lambda) * x2, elementwise.
inline std::vector<double> mixup_point(std::span<const double> x1, std::span<const double> x2, double lambda) {
    if (x1.size() != x2.size()) fail(ErrorCode::DimensionMismatch, "mixup parents differ in dimension");
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
    std::vector<double> out(x1.size());
    for (std::size_t j = 0; j < x1.size(); ++j) out[j] = lambda * x1[j] + (1.0 - lambda) * x2[j];
    return out;
}

struct LabeledPoint {
    std::vector<double> x;
    std::vector<double> y;  // soft label (class weights)
};

/// Mixes both the features and the soft labels with the same lambda. The
/// measure pipeline labels virtual points by the model instead and never
/// calls this.
inline LabeledPoint mixup_labeled(std::span<const double> x1, std::span<const double> y1, std::span<const double> x2,
                                  std::span<const double> y2, double lambda) {
    if (y1.size() != y2.size()) fail(ErrorCode::DimensionMismatch, "mixup label vectors differ in length");
    return {mixup_point(x1, x2, lambda), mixup_point(y1, y2, lambda)};
}

inline std::vector<double> one_hot(Label label, std::size_t num_classes) {
    if (label >= num_classes) fail(ErrorCode::InvalidArgument, "label out of range for one-hot encoding");
    std::vector<double> out(num_classes, 0.0);
    out[label] = 1.0;
    return out;
}

enum class LambdaKind { Uniform, Beta, Constant };

struct LambdaDistribution {
    LambdaKind kind = LambdaKind::Uniform;
    double alpha = 1.0;  // Beta(alpha, alpha)
    double value = 1.0;  // Constant

    static LambdaDistribution uniform() { return {}; }
    static LambdaDistribution beta(double alpha) { return {LambdaKind::Beta, alpha, 1.0}; }
    static LambdaDistribution constant(double value) { return {LambdaKind::Constant, 1.0, value}; }

    void validate() const {
        if (kind == LambdaKind::Beta && !(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "beta alpha must be positive");
        if (kind == LambdaKind::Constant && !(value >= 0.0 && value <= 1.0)) {
            fail(ErrorCode::InvalidArgument, "constant lambda must lie in [0, 1]");
        }
    }

    double draw(Rng& rng) const {
        switch (kind) {
            case LambdaKind::Uniform: return rng.uniform01();
            case LambdaKind::Beta: return std::clamp(rng.beta(alpha, alpha), 0.0, 1.0);
            case LambdaKind::Constant: return value;
        }
        return value;
    }
};

inline std::string to_string(LambdaKind kind) {
    switch (kind) {
        case LambdaKind::Uniform: return "uniform";
        case LambdaKind::Beta: return "beta";
        case LambdaKind::Constant: return "constant";
    }
    return "uniform";
}

struct MixupConfig {
    LambdaDistribution lambda;
    /// Virtual points per batch; unset means one per batch member.
    std::optional<std::size_t> virtual_per_batch;
    /// Keep the (model-labeled) real points next to the virtual ones.
    bool include_originals = true;

    std::size_t virtual_count(std::size_t batch_size) const { return virtual_per_batch.value_or(batch_size); }
};

struct AugmentedBatch {
    PointSet points;  // originals first (when included), then virtual points
    std::size_t num_original = 0;
    std::vector<std::pair<std::size_t, std::size_t>> parents;  // batch-local indices per virtual point
    std::vector<double> lambdas;
};

/// Model labels for every row. Errors other than a dimension mismatch are
/// reported as ClassifierError.
inline std::vector<Label> predict_labels(const Classifier& classifier, const Matrix& features) {
    std::vector<Label> labels;
    try {
        labels = classifier.predict_rows(features);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DimensionMismatch || e.code() == ErrorCode::ClassifierError) throw;
        fail(ErrorCode::ClassifierError, e.what());
    } catch (const std::exception& e) {
        fail(ErrorCode::ClassifierError, e.what());
    }
    for (Label l : labels) {
        if (l >= classifier.num_classes()) fail(ErrorCode::ClassifierError, "prediction outside the class range");
    }
    return labels;
}

/// Adds virtual points to a batch and labels every point by the classifier.
///
/// Virtual point v mixes batch member order[v mod m] (order is a fresh random
/// permutation every m points) with a uniformly drawn different member, so
/// each virtual point's parents are a uniform pair of distinct members and
/// every member is a first parent equally often.
inline AugmentedBatch augment_batch(const Batch& batch, const Classifier& classifier, const MixupConfig& config,
                                    Rng& rng) {
    config.lambda.validate();
    const std::size_t m = batch.size();
    if (m < 2) fail(ErrorCode::BatchTooSmall, "mixup needs at least 2 batch members");
    if (classifier.input_dim() != batch.features.cols()) {
        fail(ErrorCode::DimensionMismatch, "classifier expects dimension " + std::to_string(classifier.input_dim()) +
                                               ", batch has " + std::to_string(batch.features.cols()));
    }
    const std::size_t virtual_count = config.virtual_count(m);
    if (!config.include_originals && virtual_count < 2) {
        fail(ErrorCode::InvalidArgument, "virtual-only mixup needs at least 2 virtual points per batch");
    }

    AugmentedBatch out;
    out.num_original = config.include_originals ? m : 0;
    Matrix features(out.num_original + virtual_count, batch.features.cols());
    for (std::size_t i = 0; i < out.num_original; ++i) {
        const auto src = batch.features.row(i);
        std::copy(src.begin(), src.end(), features.row(i).begin());
    }

    std::vector<std::size_t> order(m);
    out.parents.reserve(virtual_count);
    out.lambdas.reserve(virtual_count);
    for (std::size_t v = 0; v < virtual_count; ++v) {
        if (v % m == 0) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t i = m - 1; i > 0; --i) {
                std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_index(i + 1))]);
            }
        }
        const std::size_t first = order[v % m];
        auto second = static_cast<std::size_t>(rng.uniform_index(m - 1));
        if (second >= first) ++second;
        const double lambda = config.lambda.draw(rng);
        const auto mixed = mixup_point(batch.features.row(first), batch.features.row(second), lambda);
        std::copy(mixed.begin(), mixed.end(), features.row(out.num_original + v).begin());
        out.parents.emplace_back(first, second);
        out.lambdas.push_back(lambda);
    }

    out.points.labels = predict_labels(classifier, features);
    out.points.features = std::move(features);
    return out;
}

}  // namespace fracdim

#endif
