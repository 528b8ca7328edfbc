#ifndef FRACDIM_CLASSIFIER_HPP
#define FRACDIM_CLASSIFIER_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dataset.hpp"
#include "dataset_io.hpp"
#include "error.hpp"
#include "paircount.hpp"

namespace fracdim {

/// Black-box model under inspection. Only its predicted class ids are used.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual Label predict(std::span<const double> x) const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t num_classes() const = 0;
    virtual std::string kind() const = 0;
    virtual nlohmann::json to_json() const = 0;

    std::vector<Label> predict_rows(const Matrix& features) const {
        std::vector<Label> out(features.rows());
        for (std::size_t i = 0; i < features.rows(); ++i) out[i] = predict(features.row(i));
        return out;
    }
};

namespace detail {

inline void require_dim(std::size_t expected, std::size_t got) {
    if (expected != got) {
        fail(ErrorCode::DimensionMismatch,
             "expected input of dimension " + std::to_string(expected) + ", got " + std::to_string(got));
    }
}

/// Index of the largest value; ties go to the lowest index.
inline Label argmax(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return static_cast<Label>(best);
}

}  // namespace detail

/// Majority label among the k nearest training points. Equal distances are
/// ordered by training index, equal votes by class id.
inline Label knn_predict(const Dataset& train, std::size_t k, std::span<const double> x) {
    if (k == 0 || k % 2 == 0) fail(ErrorCode::InvalidArgument, "k must be a positive odd integer");
    if (k > train.size()) fail(ErrorCode::InvalidArgument, "k exceeds the training set size");
    detail::require_dim(train.dim(), x.size());

    // k best (distance, index) pairs in ascending order. Indices are scanned
    // in increasing order, so a later point only displaces on a strictly
    // smaller distance.
    std::vector<std::pair<double, std::size_t>> best;
    best.reserve(k + 1);
    for (std::size_t i = 0; i < train.size(); ++i) {
        const double d = squared_distance(train.point(i), x);
        if (best.size() == k && !(d < best.back().first)) continue;
        auto pos = std::upper_bound(best.begin(), best.end(), d,
                                    [](double value, const auto& entry) { return value < entry.first; });
        best.insert(pos, {d, i});
        if (best.size() > k) best.pop_back();
    }
    std::vector<std::size_t> votes(train.num_classes(), 0);
    for (const auto& entry : best) ++votes[train.label(entry.second)];
    std::size_t winner = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[winner]) winner = c;
    }
    return static_cast<Label>(winner);
}

/// argmax_c (W x + b)_c with W stored as num_classes rows of input_dim.
inline Label linear_predict(const Matrix& weights, std::span<const double> bias, std::span<const double> x) {
    if (bias.size() != weights.rows()) fail(ErrorCode::DimensionMismatch, "bias length does not match weight rows");
    detail::require_dim(weights.cols(), x.size());
    std::vector<double> scores(weights.rows());
    for (std::size_t c = 0; c < weights.rows(); ++c) {
        const auto w = weights.row(c);
        scores[c] = std::inner_product(w.begin(), w.end(), x.begin(), bias[c]);
    }
    return detail::argmax(scores);
}

enum class Activation { Relu, Identity };

struct DenseLayer {
    Matrix weights;  // out x in
    std::vector<double> bias;
    Activation activation = Activation::Identity;
};

struct MlpWeights {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const { return layers.front().weights.cols(); }
    std::size_t num_classes() const { return layers.back().weights.rows(); }

    void validate() const {
        if (layers.empty()) fail(ErrorCode::InvalidModelFile, "mlp needs at least one layer");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& layer = layers[l];
            if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
                fail(ErrorCode::InvalidModelFile, "layer " + std::to_string(l) + " has an empty weight matrix");
            }
            if (layer.bias.size() != layer.weights.rows()) {
                fail(ErrorCode::InvalidModelFile, "layer " + std::to_string(l) + " bias length does not match weights");
            }
            if (l > 0 && layer.weights.cols() != layers[l - 1].weights.rows()) {
                fail(ErrorCode::InvalidModelFile, "layer " + std::to_string(l) + " input width does not match layer " +
                                                      std::to_string(l - 1) + " output width");
            }
        }
    }
};

inline Label mlp_predict(const MlpWeights& mlp, std::span<const double> x) {
    detail::require_dim(mlp.input_dim(), x.size());
    std::vector<double> current(x.begin(), x.end());
    std::vector<double> next;
    for (const auto& layer : mlp.layers) {
        next.assign(layer.weights.rows(), 0.0);
        for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
            const auto w = layer.weights.row(o);
            double v = std::inner_product(w.begin(), w.end(), current.begin(), layer.bias[o]);
            if (layer.activation == Activation::Relu) v = std::max(v, 0.0);
            next[o] = v;
        }
        current.swap(next);
    }
    return detail::argmax(current);
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) fail(ErrorCode::InvalidModelFile, what + " must be a non-empty array of rows");
    Matrix m;
    for (const auto& row : j) {
        if (!row.is_array() || row.empty()) fail(ErrorCode::InvalidModelFile, what + " rows must be non-empty arrays");
        std::vector<double> values;
        for (const auto& v : row) {
            if (!v.is_number()) fail(ErrorCode::InvalidModelFile, what + " entries must be numbers");
            values.push_back(v.get<double>());
        }
        if (m.rows() > 0 && values.size() != m.cols()) {
            fail(ErrorCode::InvalidModelFile, what + " has rows of different widths");
        }
        m.append_row(values);
    }
    require_finite(m);
    return m;
}

inline std::vector<double> vector_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) fail(ErrorCode::InvalidModelFile, what + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(ErrorCode::InvalidModelFile, what + " entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace detail

class KnnClassifier final : public Classifier {
public:
    KnnClassifier(Dataset train, std::size_t k) : train_(std::move(train)), k_(k) {
        if (k_ == 0 || k_ % 2 == 0) fail(ErrorCode::InvalidArgument, "k must be a positive odd integer");
        if (k_ > train_.size()) fail(ErrorCode::InvalidArgument, "k exceeds the training set size");
    }

    Label predict(std::span<const double> x) const override { return knn_predict(train_, k_, x); }
    std::size_t input_dim() const override { return train_.dim(); }
    std::size_t num_classes() const override { return train_.num_classes(); }
    std::string kind() const override { return "knn"; }
    std::size_t k() const { return k_; }
    const Dataset& train() const { return train_; }

    nlohmann::json to_json() const override {
        return {{"kind", "knn"},
                {"k", k_},
                {"num_classes", train_.num_classes()},
                {"train", {{"features", detail::matrix_to_json(train_.features())}, {"labels", train_.labels()}}}};
    }

private:
    Dataset train_;
    std::size_t k_;
};

class LinearClassifier final : public Classifier {
public:
    LinearClassifier(Matrix weights, std::vector<double> bias) : weights_(std::move(weights)), bias_(std::move(bias)) {
        if (weights_.rows() == 0 || weights_.cols() == 0) fail(ErrorCode::InvalidModelFile, "empty weight matrix");
        if (bias_.size() != weights_.rows()) fail(ErrorCode::InvalidModelFile, "bias length does not match weight rows");
    }

    Label predict(std::span<const double> x) const override { return linear_predict(weights_, bias_, x); }
    std::size_t input_dim() const override { return weights_.cols(); }
    std::size_t num_classes() const override { return weights_.rows(); }
    std::string kind() const override { return "linear"; }

    nlohmann::json to_json() const override {
        return {{"kind", "linear"}, {"weights", detail::matrix_to_json(weights_)}, {"bias", bias_}};
    }

private:
    Matrix weights_;
    std::vector<double> bias_;
};

class MlpClassifier final : public Classifier {
public:
    explicit MlpClassifier(MlpWeights weights) : weights_(std::move(weights)) { weights_.validate(); }

    Label predict(std::span<const double> x) const override { return mlp_predict(weights_, x); }
    std::size_t input_dim() const override { return weights_.input_dim(); }
    std::size_t num_classes() const override { return weights_.num_classes(); }
    std::string kind() const override { return "mlp"; }

    nlohmann::json to_json() const override {
        nlohmann::json layers = nlohmann::json::array();
        for (const auto& layer : weights_.layers) {
            layers.push_back({{"weights", detail::matrix_to_json(layer.weights)},
                              {"bias", layer.bias},
                              {"activation", layer.activation == Activation::Relu ? "relu" : "identity"}});
        }
        return {{"kind", "mlp"}, {"layers", layers}};
    }

private:
    MlpWeights weights_;
};

/// Builds a classifier from a model document. Relative "train_path" entries
/// resolve against base_dir.
inline std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& doc,
                                                        const std::filesystem::path& base_dir = {}) {
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
        fail(ErrorCode::InvalidModelFile, "model document needs a string field 'kind'");
    }
    const std::string kind = doc["kind"].get<std::string>();
    try {
        if (kind == "linear") {
            Matrix w = detail::matrix_from_json(doc.at("weights"), "weights");
            std::vector<double> b = doc.contains("bias") ? detail::vector_from_json(doc["bias"], "bias")
                                                         : std::vector<double>(w.rows(), 0.0);
            return std::make_unique<LinearClassifier>(std::move(w), std::move(b));
        }
        if (kind == "mlp") {
            MlpWeights mlp;
            const auto& layers = doc.at("layers");
            if (!layers.is_array()) fail(ErrorCode::InvalidModelFile, "layers must be an array");
            for (const auto& l : layers) {
                DenseLayer layer;
                layer.weights = detail::matrix_from_json(l.at("weights"), "layer weights");
                layer.bias = l.contains("bias") ? detail::vector_from_json(l["bias"], "layer bias")
                                                : std::vector<double>(layer.weights.rows(), 0.0);
                const std::string act = l.value("activation", std::string("identity"));
                if (act == "relu") {
                    layer.activation = Activation::Relu;
                } else if (act == "identity") {
                    layer.activation = Activation::Identity;
                } else {
                    fail(ErrorCode::InvalidModelFile, "unknown activation '" + act + "'");
                }
                mlp.layers.push_back(std::move(layer));
            }
            return std::make_unique<MlpClassifier>(std::move(mlp));
        }
        if (kind == "knn") {
            const std::size_t k = doc.at("k").get<std::size_t>();
            const std::size_t num_classes = doc.value("num_classes", std::size_t{0});
            if (doc.contains("train_path")) {
                std::filesystem::path p = doc["train_path"].get<std::string>();
                if (p.is_relative()) p = base_dir / p;
                Dataset loaded = load_dataset(p);
                return std::make_unique<KnnClassifier>(
                    Dataset(loaded.features(), loaded.labels(), std::max(num_classes, loaded.num_classes())), k);
            }
            const auto& train = doc.at("train");
            Matrix features = detail::matrix_from_json(train.at("features"), "train.features");
            std::vector<Label> labels = train.at("labels").get<std::vector<Label>>();
            return std::make_unique<KnnClassifier>(Dataset(std::move(features), std::move(labels), num_classes), k);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidModelFile, std::string("model document: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoFailure || e.code() == ErrorCode::InvalidModelFile) throw;
        fail(ErrorCode::InvalidModelFile, e.what());
    }
    fail(ErrorCode::UnknownModelKind, "unknown model kind '" + kind + "' (expected knn, linear or mlp)");
}

inline std::unique_ptr<Classifier> load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open model file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidModelFile, path.string() + ": " + e.what());
    }
    return classifier_from_json(doc, path.parent_path());
}

inline void save_classifier(const Classifier& classifier, const std::filesystem::path& path) {
    detail::write_file(path, classifier.to_json().dump(2) + "\n", false);
}

}  // namespace fracdim

#endif
