#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fracdim/classifier.hpp"
#include "fracdim/synth.hpp"
#include "test_util.hpp"

using namespace fracdim;
using testutil::code_of;
using testutil::rows;

namespace {

std::vector<double> v(std::initializer_list<double> x) { return std::vector<double>(x); }

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("fracdim_classifier_" + name);
}

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

LinearClassifier threshold_model() {
    // class 1 iff x0 > 0.5
    return LinearClassifier(rows({{0.0, 0.0}, {1.0, 0.0}}), {0.0, -0.5});
}

}  // namespace

TEST(Knn, HandExamples) {
    const Dataset train(rows({{0, 0}, {1, 0}, {0, 1}, {5, 5}}), {0, 0, 1, 1});
    EXPECT_EQ(knn_predict(train, 1, v({4, 4})), 1u);
    EXPECT_EQ(knn_predict(train, 3, v({0.1, 0.1})), 0u);
    EXPECT_EQ(knn_predict(train, 3, v({4.5, 4.5})), 1u);
    EXPECT_EQ(code_of([&] { knn_predict(train, 2, v({0, 0})); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { knn_predict(train, 5, v({0, 0})); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { knn_predict(train, 1, v({0, 0, 0})); }), ErrorCode::DimensionMismatch);
}

TEST(Knn, TiesFollowIndexThenClass) {
    // Equidistant neighbours: the lower training index wins.
    const Dataset pair(rows({{0, 0}, {2, 0}}), {1, 0});
    EXPECT_EQ(knn_predict(pair, 1, v({1, 0})), 1u);
    const Dataset swapped(rows({{2, 0}, {0, 0}}), {0, 1});
    EXPECT_EQ(knn_predict(swapped, 1, v({1, 0})), 0u);

    // One vote per class: the lowest class id wins.
    const Dataset three(rows({{0}, {1}, {2}}), {2, 1, 0});
    EXPECT_EQ(knn_predict(three, 3, v({1})), 0u);
}

TEST(Knn, AgreesWithSortedNeighbours) {
    const Dataset train = gen_two_class_circle(300, RngSeed{3});
    Rng rng(RngSeed{4});
    for (int q = 0; q < 100; ++q) {
        const std::vector<double> x{rng.uniform01(), rng.uniform01()};
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t i = 0; i < train.size(); ++i) all.push_back({squared_distance(train.point(i), x), i});
        std::sort(all.begin(), all.end());
        int ones = 0;
        for (int j = 0; j < 5; ++j) ones += train.label(all[j].second) == 1;
        EXPECT_EQ(knn_predict(train, 5, x), ones >= 3 ? 1u : 0u);
    }
}

TEST(Linear, HandExamples) {
    const LinearClassifier model(rows({{1, 0}, {0, 1}}), {0, 0});
    EXPECT_EQ(model.predict(v({0.2, 0.9})), 1u);
    EXPECT_EQ(model.predict(v({0.5, 0.5})), 0u);  // tie goes to class 0
    const LinearClassifier biased(rows({{1, 0}, {0, 1}}), {0, 100});
    EXPECT_EQ(biased.predict(v({10, 0})), 1u);
    const LinearClassifier biased0(rows({{1, 0}, {0, 1}}), {5, 0});
    EXPECT_EQ(biased0.predict(v({10, 0})), 0u);
    EXPECT_EQ(code_of([&] { model.predict(v({1})); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { LinearClassifier(rows({{1, 0}}), {0, 0}); }), ErrorCode::InvalidModelFile);
}

TEST(Linear, ThresholdMatchesRule) {
    const LinearClassifier model = threshold_model();
    const Dataset data = gen_two_class_linear(500, 2, RngSeed{5});
    EXPECT_EQ(model.predict_rows(data.features()), data.labels());
}

TEST(Linear, PredictionsInvariantUnderPositiveScaling) {
    const LinearClassifier model(rows({{0.3, -1.2, 0.5}, {-0.7, 0.4, 1.1}, {0.2, 0.2, -0.9}}), {0.1, -0.3, 0.05});
    Rng rng(RngSeed{6});
    for (int q = 0; q < 200; ++q) {
        const std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
        const Label base = model.predict(x);
        for (double s : {0.5, 2.0, 8.0}) {
            // Scaling W and b together keeps the argmax.
            Matrix w = rows({{0.3, -1.2, 0.5}, {-0.7, 0.4, 1.1}, {0.2, 0.2, -0.9}});
            for (std::size_t r = 0; r < 3; ++r) {
                for (double& e : w.row(r)) e *= s;
            }
            const LinearClassifier scaled(w, {0.1 * s, -0.3 * s, 0.05 * s});
            EXPECT_EQ(scaled.predict(x), base);
        }
    }
}

TEST(Mlp, IdentityLayerEqualsLinear) {
    MlpWeights w;
    w.layers.push_back({rows({{1, 0}, {0, 1}}), {0, 0}, Activation::Identity});
    const MlpClassifier mlp(w);
    const LinearClassifier lin(rows({{1, 0}, {0, 1}}), {0, 0});
    Rng rng(RngSeed{7});
    for (int q = 0; q < 100; ++q) {
        const std::vector<double> x{rng.normal(), rng.normal()};
        EXPECT_EQ(mlp.predict(x), lin.predict(x));
    }
}

TEST(Mlp, ReluHiddenLayer) {
    MlpWeights w;
    w.layers.push_back({rows({{1, 0}, {0, 1}}), {0, 0}, Activation::Relu});
    w.layers.push_back({rows({{1, 0}, {0, 1}}), {0, 0}, Activation::Identity});
    const MlpClassifier mlp(w);
    EXPECT_EQ(mlp.predict(v({-1, 2})), 1u);
    EXPECT_EQ(mlp.predict(v({3, 2})), 0u);
    EXPECT_EQ(mlp.predict(v({-3, -2})), 0u);  // both clipped to zero: tie
}

TEST(Mlp, Validation) {
    MlpWeights w;
    w.layers.push_back({rows({{1, 0}, {0, 1}, {1, 1}}), {0, 0, 0}, Activation::Relu});
    w.layers.push_back({rows({{1, 0}, {0, 1}}), {0, 0}, Activation::Identity});
    EXPECT_EQ(code_of([&] { MlpClassifier m(w); }), ErrorCode::InvalidModelFile);
    EXPECT_EQ(code_of([] { MlpClassifier m(MlpWeights{}); }), ErrorCode::InvalidModelFile);
}

TEST(ModelFiles, LoadLinear) {
    const auto p = temp_path("linear.json");
    write_text(p, R"({"kind": "linear", "weights": [[1, 0], [0, 1]], "bias": [0, 0]})");
    const auto model = load_classifier(p);
    EXPECT_EQ(model->kind(), "linear");
    EXPECT_EQ(model->input_dim(), 2u);
    EXPECT_EQ(model->num_classes(), 2u);
    EXPECT_EQ(model->predict(v({0.2, 0.9})), 1u);
    std::filesystem::remove(p);
}

TEST(ModelFiles, Errors) {
    const auto p = temp_path("bad.json");
    write_text(p, R"({"kind": "frobnicator"})");
    EXPECT_EQ(code_of([&] { load_classifier(p); }), ErrorCode::UnknownModelKind);
    write_text(p, R"({"kind": "linear", "weights": [[1, 0], [0]]})");
    EXPECT_EQ(code_of([&] { load_classifier(p); }), ErrorCode::InvalidModelFile);
    write_text(p, R"({"kind": "linear")");
    EXPECT_EQ(code_of([&] { load_classifier(p); }), ErrorCode::InvalidModelFile);
    write_text(p, R"({"weights": [[1]]})");
    EXPECT_EQ(code_of([&] { load_classifier(p); }), ErrorCode::InvalidModelFile);
    write_text(p, R"({"kind": "knn", "k": 2, "train": {"features": [[0], [1], [2]], "labels": [0, 1, 0]}})");
    EXPECT_EQ(code_of([&] { load_classifier(p); }), ErrorCode::InvalidModelFile);
    std::filesystem::remove(p);
    EXPECT_EQ(code_of([&] { load_classifier(temp_path("missing.json")); }), ErrorCode::IoFailure);
}

TEST(ModelFiles, KnnTrainPathResolvesRelativeToModel) {
    const auto dir = std::filesystem::temp_directory_path() / "fracdim_classifier_knn";
    std::filesystem::create_directories(dir);
    const Dataset train = gen_two_class_circle(200, RngSeed{8});
    save_dataset(train, dir / "train.csv");
    write_text(dir / "model.json", R"({"kind": "knn", "k": 5, "train_path": "train.csv"})");
    const auto model = load_classifier(dir / "model.json");
    const KnnClassifier direct(train, 5);
    Rng rng(RngSeed{9});
    for (int q = 0; q < 50; ++q) {
        const std::vector<double> x{rng.uniform01(), rng.uniform01()};
        EXPECT_EQ(model->predict(x), direct.predict(x));
    }
    std::filesystem::remove_all(dir);
}

TEST(ModelFiles, SaveLoadRoundTripPreservesPredictions) {
    std::vector<std::unique_ptr<Classifier>> models;
    models.push_back(std::make_unique<KnnClassifier>(gen_two_class_circle(150, RngSeed{10}), 3));
    models.push_back(std::make_unique<LinearClassifier>(threshold_model()));
    MlpWeights w;
    w.layers.push_back({rows({{1.5, -0.3}, {0.2, 0.8}, {-1, 1}}), {0.1, -0.2, 0.0}, Activation::Relu});
    w.layers.push_back({rows({{1, 0.5, -1}, {-0.5, 1, 0.25}}), {0.0, 0.1}, Activation::Identity});
    models.push_back(std::make_unique<MlpClassifier>(w));

    const auto p = temp_path("roundtrip.json");
    Rng rng(RngSeed{11});
    for (const auto& model : models) {
        save_classifier(*model, p);
        const auto loaded = load_classifier(p);
        EXPECT_EQ(loaded->kind(), model->kind());
        for (int q = 0; q < 100; ++q) {
            const std::vector<double> x{rng.uniform01() * 2 - 0.5, rng.uniform01() * 2 - 0.5};
            EXPECT_EQ(loaded->predict(x), model->predict(x));
        }
    }
    std::filesystem::remove(p);
}

TEST(Classifiers, RepeatedPredictionIsDeterministic) {
    const KnnClassifier knn(gen_two_class_circle(500, RngSeed{12}), 5);
    const Dataset queries = gen_uniform_cube(200, 2, RngSeed{13});
    EXPECT_EQ(knn.predict_rows(queries.features()), knn.predict_rows(queries.features()));
}
