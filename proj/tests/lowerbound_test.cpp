#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include <coreprune/error.hpp>
#include <coreprune/lowerbound.hpp>

#include "test_util.hpp"

using namespace coreprune;

namespace {

void expect_separates(const sphere_instance& inst, std::size_t j, const Eigen::VectorXd& x) {
    const Eigen::VectorXd dots = inst.points * x;
    EXPECT_GT(dots(static_cast<Eigen::Index>(j)), 1e-12);
    for (Eigen::Index q = 0; q < dots.size(); ++q)
        if (q != static_cast<Eigen::Index>(j)) EXPECT_GT(-dots(q), 1e-12) << "point " << q;
}

}  // namespace

TEST(SphereInstance, PointsLieOnTheRing) {
    const auto inst = make_sphere_instance(30, 6, 2.5, 1);
    ASSERT_EQ(inst.size(), 30u);
    for (Eigen::Index j = 0; j < 30; ++j) {
        EXPECT_NEAR(inst.points.row(j).norm(), 2.5, 1e-9);
        EXPECT_NEAR(inst.points(j, 5), 1.25, 1e-12);
        EXPECT_NEAR(inst.points.row(j).head(5).norm(), 2.5 * std::sqrt(3.0) / 2.0, 1e-12);
    }
}

TEST(SphereInstance, SmallestCaseHasDistinctPoints) {
    const auto inst = make_sphere_instance(2, 3, 1.0, 4);
    EXPECT_GT((inst.points.row(0) - inst.points.row(1)).norm(), 1e-6);
}

TEST(SphereInstance, RejectsBadParameters) {
    EXPECT_THROW(make_sphere_instance(1, 3, 1, 0), invalid_parameter);
    EXPECT_THROW(make_sphere_instance(5, 2, 1, 0), invalid_parameter);
    EXPECT_THROW(make_sphere_instance(5, 3, 0, 0), invalid_parameter);
}

TEST(SeparatingQuery, ThreeSymmetricPointsOnACircle) {
    // Points at angles 0, 120, 240 degrees: for point 0 the closest cosine is
    // -1/2, so gamma = (sqrt(3)/2)(1/2) = sqrt(3)/4 and x is parallel to
    // (1, 0, -sqrt(3)/4) with norm beta/2.
    sphere_instance inst;
    inst.alpha = 1.0;
    const double r = std::sqrt(3.0) / 2.0;
    inst.points.resize(3, 3);
    for (int j = 0; j < 3; ++j) {
        const double th = 2.0 * M_PI * j / 3.0;
        inst.points.row(j) << r * std::cos(th), r * std::sin(th), 0.5;
    }
    const auto x = separating_query(inst, 0, 1.0);
    Eigen::Vector3d dir(1.0, 0.0, -std::sqrt(3.0) / 4.0);
    dir *= 0.5 / dir.norm();
    EXPECT_LE((x - dir).cwiseAbs().maxCoeff(), 1e-12);
    // margins: +- eta r (1 - c)/2 with c = -1/2
    const double eta = 0.5 / std::sqrt(1.0 + 3.0 / 16.0);
    EXPECT_NEAR(inst.points.row(0).dot(x), eta * r * 0.75, 1e-12);
    EXPECT_NEAR(inst.points.row(1).dot(x), -eta * r * 0.75, 1e-12);
    for (std::size_t j = 0; j < 3; ++j) expect_separates(inst, j, separating_query(inst, j, 1.0));
}

TEST(SeparatingQuery, SignConditionsOnRandomInstances) {
    rng gen(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + gen.index(40), d = 3 + gen.index(6);
        const double beta = gen.uniform(0.01, 5.0);
        const auto inst = make_sphere_instance(n, d, gen.uniform(0.1, 3.0), gen.next());
        for (std::size_t j = 0; j < n; ++j) {
            const auto x = separating_query(inst, j, beta);
            EXPECT_LE(x.norm(), beta + 1e-12);
            expect_separates(inst, j, x);
            expect_separates(inst, j, 0.5 * x);
        }
    }
}

TEST(SeparatingQuery, CoincidentPointsAreDegenerate) {
    auto inst = make_sphere_instance(3, 4, 1.0, 2);
    inst.points.row(2) = inst.points.row(0);
    EXPECT_THROW(separating_query(inst, 0, 1.0), degenerate_instance);
}

TEST(Certificate, DroppingOnePointGivesRelativeErrorOne) {
    const auto inst = make_sphere_instance(20, 3, 1.0, 3);
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < 20; ++j)
        if (j != 11) subset.push_back(j);
    const auto cert =
        verify_no_multiplicative_coreset(inst, activation::relu(), subset, std::vector<double>(19, 1.0), 1.0);
    EXPECT_NEAR(cert.worst_relative_error, 1.0, 1e-9);
    EXPECT_EQ(cert.excluded_index, 11u);
    EXPECT_NEAR(cert.excluded_relative_error, 1.0, 1e-9);
}

TEST(Certificate, ReweightingCannotRepairTheExcludedQuery) {
    const auto inst = make_sphere_instance(10, 5, 1.0, 4);
    const std::vector<std::size_t> subset = {0, 2, 3, 7};
    rng gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> u(subset.size());
        for (auto& v : u) v = gen.uniform(-100, 100);
        const auto cert = verify_no_multiplicative_coreset(inst, activation::relu(), subset, u, 0.7);
        EXPECT_EQ(cert.excluded_index, 1u);
        EXPECT_NEAR(cert.excluded_relative_error, 1.0, 1e-9);
        EXPECT_GE(cert.worst_relative_error, 1.0 - 1e-9);
    }
}

TEST(Certificate, FullSetIsRejectedAndExactSumsAgree) {
    const auto inst = make_sphere_instance(6, 3, 1.0, 6);
    std::vector<std::size_t> all(6);
    std::iota(all.begin(), all.end(), std::size_t{0});
    EXPECT_THROW(verify_no_multiplicative_coreset(inst, activation::relu(), all, std::vector<double>(6, 1.0), 1.0),
                 invalid_parameter);
    // the exact subset sums match at every query of a kept point
    const std::vector<std::size_t> kept = {0, 1, 2, 3, 4};
    const auto cert =
        verify_no_multiplicative_coreset(inst, activation::relu(), kept, std::vector<double>(5, 1.0), 1.0);
    EXPECT_EQ(cert.excluded_index, 5u);
    EXPECT_EQ(cert.worst_query, 5u);
}

TEST(Certificate, OnlyReluQualifies) {
    const auto inst = make_sphere_instance(4, 3, 1.0, 6);
    EXPECT_THROW(verify_no_multiplicative_coreset(inst, activation::softplus(), {0}, {1.0}, 1.0),
                 invalid_parameter);
}

TEST(Certificate, ManyRandomInstances) {
    rng gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + gen.index(46), d = 3 + gen.index(8);
        const auto inst = make_sphere_instance(n, d, 1.0, gen.next());
        const std::size_t drop = gen.index(n);
        std::vector<std::size_t> subset;
        for (std::size_t j = 0; j < n; ++j)
            if (j != drop) subset.push_back(j);
        const auto cert = verify_no_multiplicative_coreset(inst, activation::relu(), subset,
                                                           std::vector<double>(n - 1, 1.0), 1.0);
        EXPECT_NEAR(cert.worst_relative_error, 1.0, 1e-9);
    }
}
