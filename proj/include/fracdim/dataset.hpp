#ifndef FRACDIM_DATASET_HPP
#define FRACDIM_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace fracdim {

using Label = std::uint32_t;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            fail(ErrorCode::InvalidArgument, "matrix storage size does not match shape");
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    const std::vector<double>& values() const noexcept { return values_; }

    void append_row(std::span<const double> r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) fail(ErrorCode::DimensionMismatch, "row width does not match matrix");
        values_.insert(values_.end(), r.begin(), r.end());
        ++rows_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

inline void require_finite(const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (double v : m.row(i)) {
            if (!std::isfinite(v)) {
                fail(ErrorCode::NonFiniteInput, "non-finite feature at row " + std::to_string(i + 1));
            }
        }
    }
}

/// Labeled point set: n feature vectors of dimension d with dense class ids.
class Dataset {
public:
    /// num_classes == 0 means "1 + max(label)".
    Dataset(Matrix features, std::vector<Label> labels, std::size_t num_classes = 0)
        : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
        if (features_.rows() < 2) fail(ErrorCode::InvalidDataset, "dataset needs at least 2 samples");
        if (features_.cols() < 1) fail(ErrorCode::InvalidDataset, "dataset needs at least 1 feature");
        if (labels_.size() != features_.rows()) {
            fail(ErrorCode::InvalidDataset, "label count does not match sample count");
        }
        require_finite(features_);
        const Label max_label = *std::max_element(labels_.begin(), labels_.end());
        if (num_classes_ == 0) num_classes_ = static_cast<std::size_t>(max_label) + 1;
        if (max_label >= num_classes_) fail(ErrorCode::InvalidDataset, "label exceeds num_classes");
    }

    std::size_t size() const noexcept { return features_.rows(); }
    std::size_t dim() const noexcept { return features_.cols(); }
    std::size_t num_classes() const noexcept { return num_classes_; }

    const Matrix& features() const noexcept { return features_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    std::span<const double> point(std::size_t i) const { return features_.row(i); }
    Label label(std::size_t i) const { return labels_[i]; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Matrix features_;
    std::vector<Label> labels_;
    std::size_t num_classes_;
};

/// A labeled point set that is the working unit of pair counting: a sampled
/// batch, or a batch augmented with virtual points.
struct PointSet {
    Matrix features;
    std::vector<Label> labels;

    std::size_t size() const noexcept { return features.rows(); }
};

struct Batch {
    std::vector<std::size_t> indices;
    Matrix features;
    std::vector<Label> labels;

    std::size_t size() const noexcept { return indices.size(); }
    PointSet as_point_set() const { return {features, labels}; }
};

/// Rows `indices` of `dataset`, in the given order.
inline Batch make_batch(const Dataset& dataset, std::vector<std::size_t> indices) {
    Batch batch;
    batch.features = Matrix(indices.size(), dataset.dim());
    batch.labels.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto src = dataset.point(indices[k]);
        std::copy(src.begin(), src.end(), batch.features.row(k).begin());
        batch.labels.push_back(dataset.label(indices[k]));
    }
    batch.indices = std::move(indices);
    return batch;
}

/// Uniform draw of batch_size distinct rows (partial Fisher-Yates).
inline Batch sample_batch(const Dataset& dataset, std::size_t batch_size, Rng& rng) {
    if (batch_size < 2) fail(ErrorCode::BatchTooSmall, "batch size must be at least 2");
    if (batch_size > dataset.size()) {
        fail(ErrorCode::BatchTooLarge, "batch size " + std::to_string(batch_size) + " exceeds dataset size " +
                                           std::to_string(dataset.size()));
    }
    std::vector<std::size_t> pool(dataset.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < batch_size; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.uniform_index(pool.size() - k));
        std::swap(pool[k], pool[j]);
    }
    pool.resize(batch_size);
    return make_batch(dataset, std::move(pool));
}

}  // namespace fracdim

#endif
