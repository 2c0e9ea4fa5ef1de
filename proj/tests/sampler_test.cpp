#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include <coreprune/error.hpp>
#include <coreprune/eval.hpp>
#include <coreprune/sampler.hpp>

#include "test_util.hpp"

using namespace coreprune;

namespace {

weighted_set set_with_norms(const std::vector<double>& norms, const std::vector<double>& w) {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(norms.size()), 2);
    for (std::size_t j = 0; j < norms.size(); ++j) pts(static_cast<Eigen::Index>(j), j % 2) = norms[j];
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return weighted_set::single(pts, wv);
}

// Brute-force sum_p w_i(p) phi(p^T x).
double exact_sum(const weighted_set& s, const activation& act, const Eigen::VectorXd& x, std::size_t i) {
    double total = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < s.dimension(); ++c)
            dot += s.coords()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) *
                   x(static_cast<Eigen::Index>(c));
        total += s.weight(j, i) * act(dot);
    }
    return total;
}

double estimate(const weighted_set& s, const coreset& cs, const activation& act, const Eigen::VectorXd& x,
                std::size_t i) {
    double total = 0.0;
    for (const auto& [q, e] : cs.entries) total += e.weights[i] * act(s.point(q).dot(x));
    return total;
}

}  // namespace

TEST(Sensitivity, SymmetricSetIsUniform) {
    const auto s = set_with_norms({1, 1, 1}, {1, 1, 1});
    const auto d = make_sensitivity_distribution(s, activation::relu(), 1.0);
    for (double p : d.probabilities) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(Sensitivity, ProportionalToNormForRelu) {
    const auto s = set_with_norms({1, 3}, {1, 1});
    const auto d = make_sensitivity_distribution(s, activation::relu(), 1.0);
    EXPECT_NEAR(d.probabilities[0], 0.25, 1e-15);
    EXPECT_NEAR(d.probabilities[1], 0.75, 1e-15);
    EXPECT_NEAR(d.total_sensitivity, 4.0, 1e-15);
}

TEST(Sensitivity, BinaryIsProportionalToAbsWeight) {
    const auto s = set_with_norms({0.3, 7, 2}, {2, -1, 1});
    const auto d = make_sensitivity_distribution(s, activation::binary(), 1.0);
    EXPECT_NEAR(d.probabilities[0], 0.5, 1e-15);
    EXPECT_NEAR(d.probabilities[1], 0.25, 1e-15);
    EXPECT_NEAR(d.probabilities[2], 0.25, 1e-15);
}

TEST(Sensitivity, UsesLargestAbsoluteWeightAcrossConsumers) {
    Eigen::MatrixXd pts(2, 1);
    pts << 1, 1;
    Eigen::MatrixXd w(2, 2);
    w << -3, 1,  //
        0.5, 1;
    const auto d = make_sensitivity_distribution(weighted_set(pts, w), activation::relu(), 1.0);
    EXPECT_NEAR(d.probabilities[0], 0.75, 1e-15);
}

TEST(Sensitivity, AllZeroIsAnError) {
    const auto s = set_with_norms({1, 2}, {0, 0});
    EXPECT_THROW(make_sensitivity_distribution(s, activation::relu(), 1.0), all_zero_sensitivity);
    // zero-norm points are dead under relu
    const auto z = set_with_norms({0, 0}, {1, 1});
    EXPECT_THROW(make_sensitivity_distribution(z, activation::relu(), 1.0), all_zero_sensitivity);
}

TEST(Sensitivity, ZeroSensitivityPointsAreNeverDrawn) {
    const auto s = set_with_norms({0, 2, 0, 1}, {5, 1, 5, 1});
    const auto d = make_sensitivity_distribution(s, activation::relu(), 1.0);
    EXPECT_EQ(d.probabilities[0], 0.0);
    EXPECT_EQ(d.probabilities[2], 0.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto cs = coreset_single(s, 20, activation::relu(), 1.0, seed);
        EXPECT_FALSE(cs.entries.count(0));
        EXPECT_FALSE(cs.entries.count(2));
    }
}

TEST(Sensitivity, ProbabilitySimplexOnRandomSets) {
    rng gen(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = fixtures::random_set(1 + gen.index(30), 1 + gen.index(6), 1 + gen.index(4), gen);
        for (auto k : all_activation_kinds) {
            const auto d = make_sensitivity_distribution(s, fixtures::any_activation(k), gen.uniform(0.1, 3));
            double sum = 0.0;
            for (double p : d.probabilities) {
                EXPECT_GE(p, 0.0);
                sum += p;
            }
            EXPECT_NEAR(sum, 1.0, 1e-9);
        }
    }
}

TEST(Sensitivity, ReluIsBetaInvariant) {
    rng gen(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = fixtures::random_set(2 + gen.index(40), 1 + gen.index(8), 1 + gen.index(3), gen);
        const auto a = make_sensitivity_distribution(s, activation::relu(), 0.1);
        const auto b = make_sensitivity_distribution(s, activation::relu(), 1.0);
        const auto c = make_sensitivity_distribution(s, activation::relu(), 100.0);
        for (std::size_t j = 0; j < s.size(); ++j) {
            EXPECT_NEAR(a.probabilities[j], b.probabilities[j], 1e-12);
            EXPECT_NEAR(c.probabilities[j], b.probabilities[j], 1e-12);
        }
    }
}

TEST(SampleSize, DirectFormula) {
    EXPECT_EQ(sample_size(0.1, 0.1, 1.0, 4, 10.0).m, 11513u);
}

TEST(SampleSize, SmallTotalSensitivityUsesLogGuard) {
    // ln(max(t, e)) = 1 for t = 1: ceil(4 * (1 + ln 2)) = 7.
    // Without the guard ln(1) = 0 would give ceil(4 ln 2) = 3.
    const auto plan = sample_size(0.5, 0.5, 1.0, 1, 1.0);
    EXPECT_EQ(plan.m, 7u);
    EXPECT_EQ(static_cast<std::size_t>(std::ceil(4.0 * std::log(2.0))), 3u);
    EXPECT_EQ(plan.vc_dim, 1u);
    EXPECT_DOUBLE_EQ(plan.t, 1.0);
}

TEST(SampleSize, MonotoneInTotalSensitivity) {
    for (double t : {0.01, 0.5, 1.0, 2.0, 3.0, 10.0, 250.0}) {
        const auto a = sample_size(0.2, 0.05, 1.0, 3, t);
        const auto b = sample_size(0.2, 0.05, 1.0, 3, 2 * t);
        EXPECT_GE(b.m, a.m);
        if (a.m > 10) EXPECT_GE(b.m, 2 * a.m - 1);  // at least doubles, up to ceil rounding
    }
    EXPECT_GE(sample_size(0.5, 0.5, 1.0, 1, 1e-9).m, 1u);
}

TEST(SampleSize, RejectsOutOfRange) {
    EXPECT_THROW(sample_size(0.0, 0.1, 1, 1, 1), invalid_parameter);
    EXPECT_THROW(sample_size(1.0, 0.1, 1, 1, 1), invalid_parameter);
    EXPECT_THROW(sample_size(0.1, 1.0, 1, 1, 1), invalid_parameter);
    EXPECT_THROW(sample_size(0.1, 0.0, 1, 1, 1), invalid_parameter);
    EXPECT_THROW(sample_size(0.1, 0.1, 0, 1, 1), invalid_parameter);
    EXPECT_THROW(sample_size(0.1, 0.1, 1, 0, 1), invalid_parameter);
    EXPECT_THROW(sample_size(0.1, 0.1, 1, 1, 0), invalid_parameter);
}

TEST(CoresetSingle, SinglePointKeepsItsWeight) {
    const auto s = set_with_norms({2.0}, {-1.5});
    for (std::size_t m : {1u, 7u, 100u}) {
        const auto cs = coreset_single(s, m, activation::relu(), 1.0, 3);
        ASSERT_EQ(cs.size(), 1u);
        EXPECT_NEAR(cs.weight(0, 0), -1.5, 1e-12);
        EXPECT_EQ(cs.entries.at(0).draws, m);
    }
}

TEST(CoresetSingle, UniformSymmetricSetWeightsFollowDrawCounts) {
    // pr = 1/n, so a point drawn j times ends with u = w n j / m
    const auto s = set_with_norms({1, 1, 1, 1, 1}, {2, 2, 2, 2, 2});
    const std::size_t m = 13, n = 5;
    const auto cs = coreset_single(s, m, activation::relu(), 1.0, 99);
    std::size_t total_draws = 0;
    for (const auto& [q, e] : cs.entries) {
        EXPECT_NEAR(e.weights[0], 2.0 * n * e.draws / m, 1e-12);
        total_draws += e.draws;
    }
    EXPECT_EQ(total_draws, m);
}

TEST(CoresetSingle, DeterministicForSeed) {
    rng gen(5);
    const auto s = fixtures::random_set(30, 4, 1, gen);
    const auto a = coreset_single(s, 17, activation::sigmoid(), 2.0, 1234);
    const auto b = coreset_single(s, 17, activation::sigmoid(), 2.0, 1234);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.seed, 1234u);
    EXPECT_EQ(a.sample_count, 17u);
    const auto c = coreset_single(s, 17, activation::sigmoid(), 2.0, 1235);
    EXPECT_NE(a, c);
}

TEST(CoresetSingle, RejectsMultipleConsumers) {
    rng gen(5);
    EXPECT_THROW(coreset_single(fixtures::random_set(5, 2, 2, gen), 3, activation::relu(), 1, 0),
                 invalid_parameter);
    EXPECT_THROW(coreset_single(fixtures::random_set(5, 2, 1, gen), 0, activation::relu(), 1, 0),
                 invalid_parameter);
}

TEST(CoresetLayer, DegenerateLayerEqualsSingle) {
    rng gen(6);
    const auto s = fixtures::random_set(25, 3, 1, gen);
    for (std::uint64_t seed : {0u, 1u, 77u})
        EXPECT_EQ(coreset_layer(s, 11, activation::softplus(), 1.5, seed),
                  coreset_single(s, 11, activation::softplus(), 1.5, seed));
}

TEST(CoresetLayer, IdenticalConsumersGetIdenticalWeights) {
    rng gen(7);
    const Eigen::MatrixXd pts = fixtures::random_matrix(15, 3, gen);
    const Eigen::MatrixXd w1 = fixtures::random_matrix(15, 1, gen);
    Eigen::MatrixXd w(15, 2);
    w << w1, w1;
    const auto cs = coreset_layer(weighted_set(pts, w), 9, activation::relu(), 1.0, 4);
    for (const auto& [q, e] : cs.entries) EXPECT_EQ(e.weights[0], e.weights[1]);
}

TEST(CoresetLayer, HandTracedDisjointConsumers) {
    // w1 = (1, 0), w2 = (0, 1), equal norms: pr = (1/2, 1/2). With m = 2 each
    // draw of point 0 adds 1/(2 * 0.5) = 1 to u1(0) and nothing to u2(0).
    Eigen::MatrixXd pts(2, 2);
    pts << 1, 0,  //
        0, 1;
    Eigen::MatrixXd w(2, 2);
    w << 1, 0,  //
        0, 1;
    const weighted_set s(pts, w);
    const auto d = make_sensitivity_distribution(s, activation::relu(), 1.0);
    EXPECT_NEAR(d.probabilities[0], 0.5, 1e-15);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto cs = coreset_layer(s, 2, activation::relu(), 1.0, seed);
        for (const auto& [q, e] : cs.entries) {
            const double j = static_cast<double>(e.draws);
            EXPECT_DOUBLE_EQ(e.weights[0], q == 0 ? j : 0.0);
            EXPECT_DOUBLE_EQ(e.weights[1], q == 1 ? j : 0.0);
        }
    }
}

TEST(CoresetLayer, CardinalityAndSharedSupport) {
    rng gen(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + gen.index(50), k = 1 + gen.index(5), m = 1 + gen.index(60);
        const auto s = fixtures::random_set(n, 3, k, gen);
        const auto cs = coreset_layer(s, m, activation::relu(), 1.0, gen.next());
        EXPECT_LE(cs.size(), m);
        EXPECT_LE(cs.size(), n);
        std::size_t draws = 0;
        for (const auto& [q, e] : cs.entries) {
            EXPECT_LT(q, n);
            EXPECT_EQ(e.weights.size(), k);  // one weight per consumer on one shared index set
            draws += e.draws;
        }
        EXPECT_EQ(draws, m);
    }
}

TEST(CoresetLayer, UnbiasedForEveryConsumerAndQuery) {
    rng gen(9);
    const std::size_t n = 20, d = 5, k = 3, m = 10, reps = 20000;
    const auto s = fixtures::random_set(n, d, k, gen);
    const auto act = activation::relu();
    std::vector<Eigen::VectorXd> queries;
    for (int i = 0; i < 5; ++i) queries.push_back(fixtures::random_in_ball(d, 1.0, gen));

    std::vector<double> sum(queries.size() * k, 0.0), sumsq(queries.size() * k, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto cs = coreset_layer(s, m, act, 1.0, derive_seed(2024, r));
        for (std::size_t qi = 0; qi < queries.size(); ++qi)
            for (std::size_t i = 0; i < k; ++i) {
                const double v = estimate(s, cs, act, queries[qi], i);
                sum[qi * k + i] += v;
                sumsq[qi * k + i] += v * v;
            }
    }
    for (std::size_t qi = 0; qi < queries.size(); ++qi)
        for (std::size_t i = 0; i < k; ++i) {
            const double mean = sum[qi * k + i] / reps;
            const double var = (sumsq[qi * k + i] / reps - mean * mean) * reps / (reps - 1);
            const double se = std::sqrt(var / reps);
            EXPECT_LE(std::abs(mean - exact_sum(s, act, queries[qi], i)), 4 * se)
                << "query " << qi << " consumer " << i;
        }
}

TEST(CoresetSingle, ErrorDecaysLikeInverseSqrtM) {
    rng gen(10);
    const auto s = fixtures::random_set(500, 20, 1, gen);
    const auto act = activation::relu();
    Eigen::MatrixXd queries(20, 50);
    for (Eigen::Index c = 0; c < queries.cols(); ++c) queries.col(c) = fixtures::random_in_ball(20, 1.0, gen);
    const neuron_error_evaluator score(s, act, queries);
    std::vector<double> ms, errs;
    for (std::size_t m = 10; m <= 1280; m *= 2) {
        double e = 0.0;
        for (int trial = 0; trial < 10; ++trial) e += score(coreset_single(s, m, act, 1.0, derive_seed(m, trial)));
        ms.push_back(static_cast<double>(m));
        errs.push_back(e / 10);
    }
    const double slope = loglog_slope(ms, errs);
    EXPECT_GE(slope, -0.7);
    EXPECT_LE(slope, -0.3);
}
