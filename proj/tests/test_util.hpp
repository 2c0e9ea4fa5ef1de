#ifndef COREPRUNE_TESTS_TEST_UTIL_HPP
#define COREPRUNE_TESTS_TEST_UTIL_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include <coreprune/activation.hpp>
#include <coreprune/rng.hpp>
#include <coreprune/weighted_set.hpp>

namespace coreprune::fixtures {

inline Eigen::MatrixXd random_matrix(std::size_t rows, std::size_t cols, rng& gen, double scale = 1.0) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = scale * gen.normal();
    return m;
}

/// n points in R^d with k mixed-sign weights, all entries N(0, scale^2).
inline weighted_set random_set(std::size_t n, std::size_t d, std::size_t k, rng& gen, double scale = 1.0) {
    return weighted_set(random_matrix(n, d, gen, scale), random_matrix(n, k, gen));
}

inline Eigen::VectorXd random_in_ball(std::size_t d, double radius, rng& gen) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gen.normal();
    return x * (radius * gen.uniform() / x.norm());
}

inline activation any_activation(activation_kind k) {
    return k == activation_kind::softclip ? activation::softclip(4.0) : activation::make(k);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("coreprune_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace coreprune::fixtures

#endif  // COREPRUNE_TESTS_TEST_UTIL_HPP
