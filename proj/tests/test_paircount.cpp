#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracdim/dataset.hpp"
#include "fracdim/paircount.hpp"
#include "fracdim/synth.hpp"
#include "oracles.hpp"

using namespace fracdim;

namespace {

Matrix points(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m;
    for (auto r : rows) m.append_row(std::vector<double>(r));
    return m;
}

RadiusSet radii(std::vector<double> r) {
    RadiusSet s;
    s.radii = std::move(r);
    s.percentile_lo = 0.01;
    s.percentile_hi = 0.3;
    return s;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(PairwiseDistances, HandExamples) {
    EXPECT_EQ(pairwise_distances(points({{0, 0}, {3, 4}})), std::vector<double>{5.0});
    EXPECT_EQ(pairwise_distances(points({{1, 1}, {1, 1}, {1, 1}})), (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_EQ(pairwise_distances(points({{0}, {1}, {3}})), (std::vector<double>{1.0, 3.0, 2.0}));
}

TEST(PairwiseDistances, Errors) {
    EXPECT_EQ(code_of([] { pairwise_distances(points({{0, 0}})); }), ErrorCode::BatchTooSmall);
    Matrix bad(2, 1, {0.0, INFINITY});
    EXPECT_EQ(code_of([&] { pairwise_distances(bad); }), ErrorCode::NonFiniteInput);
}

TEST(RadiusSet, NearestRankAndGeometricSpacing) {
    std::vector<double> d(100);
    std::iota(d.begin(), d.end(), 1.0);
    std::reverse(d.begin(), d.end());
    const RadiusSet s = derive_radius_set(d, 0.10, 0.50, 3);
    ASSERT_EQ(s.num_scales(), 3u);
    EXPECT_DOUBLE_EQ(s.radii[0], 10.0);
    EXPECT_NEAR(s.radii[1], std::sqrt(500.0), 1e-12);
    EXPECT_NEAR(s.radii[1], 22.3607, 1e-4);
    EXPECT_DOUBLE_EQ(s.radii[2], 50.0);
}

TEST(RadiusSet, DefaultRangeHasConstantRatio) {
    const Dataset d = gen_uniform_cube(2000, 2, RngSeed{4});
    const RadiusSet s = derive_radius_set(pilot_distances(d, RngSeed{4}), 0.01, 0.3, 20);
    ASSERT_EQ(s.num_scales(), 20u);
    const double ratio = s.radii[1] / s.radii[0];
    for (std::size_t k = 1; k < s.num_scales(); ++k) {
        EXPECT_GT(s.radii[k], s.radii[k - 1]);
        EXPECT_NEAR(s.radii[k] / s.radii[k - 1], ratio, 1e-12);
    }
}

TEST(RadiusSet, DegenerateSamples) {
    EXPECT_EQ(code_of([] { derive_radius_set(std::vector<double>(50, 2.5), 0.1, 0.5, 3); }), ErrorCode::DegenerateScale);
    // Zero lower quantile: duplicates dominate.
    std::vector<double> mostly_zero(100, 0.0);
    for (int k = 0; k < 10; ++k) mostly_zero[k] = 1.0 + k;
    EXPECT_EQ(code_of([&] { derive_radius_set(mostly_zero, 0.1, 0.95, 3); }), ErrorCode::DegenerateScale);
    std::vector<double> d(100);
    std::iota(d.begin(), d.end(), 1.0);
    EXPECT_EQ(code_of([&] { derive_radius_set(d, 0.5, 0.3, 3); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { derive_radius_set(d, 0.1, 0.3, 1); }), ErrorCode::InvalidArgument);
}

TEST(PilotDistances, ExhaustiveWhenSmall) {
    const Dataset d = gen_uniform_cube(100, 2, RngSeed{3});
    EXPECT_EQ(pilot_distances(d, RngSeed{1}).size(), 4950u);
    const auto sample = pilot_distances(d, RngSeed{1}, 1000);
    EXPECT_EQ(sample.size(), 1000u);
    EXPECT_EQ(sample, pilot_distances(d, RngSeed{1}, 1000));
    EXPECT_TRUE(std::all_of(sample.begin(), sample.end(), [](double x) { return x > 0.0; }));
}

TEST(CountPairs, HandExample) {
    const Matrix x = points({{0}, {1}, {5}});
    const std::vector<Label> labels{0, 1, 0};
    const auto cross = count_pairs(x, labels, radii({2, 6}), PairMode::CrossClass);
    EXPECT_EQ(cross.counts, (std::vector<std::uint64_t>{1, 2}));
    const auto all = count_pairs(x, labels, radii({2, 6}), PairMode::AllPairs);
    EXPECT_EQ(all.counts, (std::vector<std::uint64_t>{1, 3}));
}

TEST(CountPairs, SaturatesAtAllPairs) {
    const Dataset d = gen_uniform_cube(60, 3, RngSeed{8});
    const auto curve = count_pairs(d.features(), d.labels(), radii({0.1, 0.5, 2.0}), PairMode::AllPairs);
    EXPECT_EQ(curve.counts.back(), 60u * 59u / 2u);
}

TEST(CountPairs, BoundaryIsInclusive) {
    // Integer distances 3-4-5 and 6-8-10: exact in floating point.
    const Matrix x = points({{0, 0}, {3, 4}, {6, 8}});
    const std::vector<Label> labels{0, 1, 0};
    const auto curve = count_pairs(x, labels, radii({4.999999, 5.0, 10.0}), PairMode::AllPairs);
    EXPECT_EQ(curve.counts, (std::vector<std::uint64_t>{0, 2, 3}));
}

TEST(CountPairs, SingleClassHasNoCrossPairs) {
    const Matrix x = points({{0}, {1}});
    const std::vector<Label> labels{2, 2};
    EXPECT_EQ(code_of([&] { count_pairs(x, labels, radii({1, 2}), PairMode::CrossClass); }), ErrorCode::NoCrossPairs);
    EXPECT_NO_THROW(count_pairs(x, labels, radii({1, 2}), PairMode::AllPairs));
}

// Agreement with direct enumeration, monotonicity, mode consistency and
// permutation symmetry over random small batches.
TEST(CountPairs, PropertiesAgainstBruteForce) {
    Rng rng(RngSeed{99});
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.uniform_index(30);
        const std::size_t d = 1 + rng.uniform_index(4);
        std::vector<std::vector<double>> pts(m, std::vector<double>(d));
        std::vector<unsigned> labels(m);
        Matrix x(m, d);
        std::vector<Label> lab(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < d; ++j) x(i, j) = pts[i][j] = std::round(rng.uniform01() * 8.0);
            lab[i] = labels[i] = static_cast<unsigned>(rng.uniform_index(3));
        }
        lab[0] = labels[0] = 0;
        lab[m - 1] = labels[m - 1] = 1;
        const RadiusSet r = radii({0.5, 1.0, std::sqrt(2.0), 2.0, 3.0, 5.0, 8.0});

        const auto all = count_pairs(x, lab, r, PairMode::AllPairs);
        const auto cross = count_pairs(x, lab, r, PairMode::CrossClass);
        EXPECT_EQ(all.counts, oracle::brute_force_counts(pts, labels, r.radii, false));
        EXPECT_EQ(cross.counts, oracle::brute_force_counts(pts, labels, r.radii, true));
        for (std::size_t k = 0; k < r.num_scales(); ++k) {
            EXPECT_LE(cross.counts[k], all.counts[k]);
            if (k > 0) {
                EXPECT_GE(all.counts[k], all.counts[k - 1]);
                EXPECT_GE(cross.counts[k], cross.counts[k - 1]);
            }
        }

        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
        Matrix px(m, d);
        std::vector<Label> plab(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < d; ++j) px(i, j) = x(perm[i], j);
            plab[i] = lab[perm[i]];
        }
        EXPECT_EQ(count_pairs(px, plab, r, PairMode::CrossClass).counts, cross.counts);
    }
}

TEST(CountPairs, CurveCsvExport) {
    const Matrix x = points({{0}, {1}, {5}});
    const std::vector<Label> labels{0, 1, 0};
    const auto curve = count_pairs(x, labels, radii({2, 6}), PairMode::AllPairs);
    EXPECT_EQ(format_curve_csv(curve), "r,count\n2,1\n6,3\n");
}
