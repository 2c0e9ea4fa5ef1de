#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <coreprune/baselines.hpp>
#include <coreprune/error.hpp>

#include "test_util.hpp"

using namespace coreprune;

namespace {

weighted_set line_set(const std::vector<double>& norms, const std::vector<double>& w) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(norms.size()), 1);
    Eigen::VectorXd wv(static_cast<Eigen::Index>(w.size()));
    for (std::size_t j = 0; j < norms.size(); ++j) {
        pts(static_cast<Eigen::Index>(j), 0) = norms[j];
        wv(static_cast<Eigen::Index>(j)) = w[j];
    }
    return weighted_set::single(pts, wv);
}

}  // namespace

TEST(Uniform, SinglePoint) {
    const auto s = line_set({3}, {0.7});
    const auto cs = uniform_coreset(s, 9, 1);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_NEAR(cs.weight(0, 0), 0.7, 1e-12);
}

TEST(Uniform, WeightsFollowDrawCounts) {
    const auto s = line_set({1, 5, 2, 8, 3, 1}, {1, -2, 3, 0.5, 1, 4});
    const double n = 6, m = 17;
    const auto cs = uniform_coreset(s, 17, 42);
    for (const auto& [q, e] : cs.entries)
        EXPECT_NEAR(e.weights[0], s.weight(q, 0) * n * static_cast<double>(e.draws) / m, 1e-12);
    EXPECT_EQ(cs, uniform_coreset(s, 17, 42));
    EXPECT_LE(cs.size(), 17u);
}

TEST(Uniform, Unbiased) {
    rng gen(3);
    const auto s = fixtures::random_set(20, 4, 2, gen);
    const auto act = activation::relu();
    const Eigen::VectorXd x = fixtures::random_in_ball(4, 1.0, gen);
    const std::size_t reps = 20000;
    for (std::size_t i = 0; i < 2; ++i) {
        double exact = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) exact += s.weight(j, i) * act(s.point(j).dot(x));
        double sum = 0, sumsq = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto cs = uniform_coreset(s, 10, derive_seed(5, r));
            double v = 0.0;
            for (const auto& [q, e] : cs.entries) v += e.weights[i] * act(s.point(q).dot(x));
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / reps;
        const double se = std::sqrt((sumsq / reps - mean * mean) / (reps - 1));
        EXPECT_LE(std::abs(mean - exact), 4 * se);
    }
}

TEST(Percentile, KeepsLargestNormsUnweighted) {
    const auto s = line_set({3, 1, 2}, {0.1, 0.2, 0.3});
    const auto cs = percentile_coreset(s, 2);
    EXPECT_EQ(cs.indices(), (std::vector<std::size_t>{0, 2}));
    EXPECT_DOUBLE_EQ(cs.weight(0, 0), 0.1);
    EXPECT_DOUBLE_EQ(cs.weight(2, 0), 0.3);
}

TEST(Percentile, KeepAllIsIdentity) {
    rng gen(4);
    const auto s = fixtures::random_set(12, 3, 3, gen);
    const auto cs = percentile_coreset(s, 12);
    ASSERT_EQ(cs.size(), 12u);
    for (std::size_t j = 0; j < 12; ++j)
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(cs.weight(j, i), s.weight(j, i));
}

TEST(Percentile, TiesGoToLowerIndex) {
    const auto s = line_set({1, 1, 1}, {1, 2, 3});
    EXPECT_EQ(percentile_coreset(s, 1).indices(), (std::vector<std::size_t>{0}));
    EXPECT_EQ(percentile_coreset(s, 2).indices(), (std::vector<std::size_t>{0, 1}));
}

TEST(Percentile, RejectsOversizedM) {
    const auto s = line_set({1, 2}, {1, 1});
    EXPECT_THROW(percentile_coreset(s, 3), invalid_parameter);
    EXPECT_THROW(percentile_coreset(s, 0), invalid_parameter);
}

TEST(Percentile, Deterministic) {
    rng gen(5);
    const auto s = fixtures::random_set(40, 3, 2, gen);
    EXPECT_EQ(percentile_coreset(s, 13), percentile_coreset(s, 13));
}

TEST(NormSampling, Distributions) {
    const auto s = line_set({1, 1, 1}, {2, 1, 1});
    const auto l1 = norm_sampling_probabilities(s, baseline_kind::l1);
    EXPECT_NEAR(l1[0], 0.5, 1e-15);
    EXPECT_NEAR(l1[1], 0.25, 1e-15);
    const auto l2 = norm_sampling_probabilities(s, baseline_kind::l2);
    EXPECT_NEAR(l2[0], 4.0 / 6.0, 1e-15);
    EXPECT_NEAR(l2[2], 1.0 / 6.0, 1e-15);
    // l1l2: (|w| + w^2)/2 = (3, 1, 1) -> (3/5, 1/5, 1/5)
    const auto both = norm_sampling_probabilities(s, baseline_kind::l1l2);
    EXPECT_NEAR(both[0], 0.6, 1e-15);
}

TEST(NormSampling, EqualWeightsGiveUniform) {
    const auto s = line_set({1, 7, 3, 2}, {-0.5, 0.5, 0.5, -0.5});
    for (auto k : {baseline_kind::l1, baseline_kind::l2, baseline_kind::l1l2})
        for (double p : norm_sampling_probabilities(s, k)) EXPECT_NEAR(p, 0.25, 1e-15);
}

TEST(NormSampling, AllZeroScores) {
    const auto s = line_set({1, 2}, {0, 0});
    EXPECT_THROW(norm_sampling_coreset(s, 3, baseline_kind::l2, 1), all_zero_sensitivity);
}

TEST(NormSampling, ReweightsLikeTheCoreset) {
    const auto s = line_set({1, 1, 1}, {2, 1, -1});
    const auto pr = norm_sampling_probabilities(s, baseline_kind::l1);
    const auto cs = norm_sampling_coreset(s, 8, baseline_kind::l1, 21);
    EXPECT_LE(cs.size(), 8u);
    for (const auto& [q, e] : cs.entries)
        EXPECT_NEAR(e.weights[0], s.weight(q, 0) * static_cast<double>(e.draws) / (8 * pr[q]), 1e-12);
}

TEST(Baselines, ParseNames) {
    for (auto k : {baseline_kind::uniform, baseline_kind::percentile, baseline_kind::l1, baseline_kind::l2,
                   baseline_kind::l1l2})
        EXPECT_EQ(parse_baseline(baseline_name(k)), k);
    EXPECT_FALSE(parse_baseline("svd").has_value());
}
