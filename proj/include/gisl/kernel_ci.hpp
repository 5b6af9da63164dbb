#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gisl {

struct Column {
    Eigen::VectorXd values;
    bool binary = false;  // delta kernel instead of Gaussian

    static Column real(Eigen::VectorXd v) { return {std::move(v), false}; }
    static Column indicator(Eigen::VectorXd v) { return {std::move(v), true}; }
};

enum class NullMode { Gamma, Permutation };

struct KernelCiConfig {
    double alpha = 0.05;
    std::size_t n_max = 1500;
    double ridge = 1e-3;
    bool ridge_scales_with_n = false;  // ridge * n when set
    std::size_t bandwidth_rows = 1000;
    std::size_t max_rank = 400;
    double cholesky_tol = 1e-4;
    NullMode null_mode = NullMode::Gamma;
    std::size_t permutations = 500;
    std::uint64_t seed = 0;
};

enum class CiNote { None, ZeroVariance };

struct CiVerdict {
    double statistic = 0.0;
    double p_value = 1.0;
    bool dependent = false;
    double alpha = 0.05;
    std::size_t n_used = 0;
    CiNote note = CiNote::None;
};

struct CiError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientSamples : CiError {
    using CiError::CiError;
};
struct SingularSolve : CiError {
    using CiError::CiError;
};

CiVerdict unconditional_test(const Column& x, const Column& y, const KernelCiConfig& cfg = {});
CiVerdict conditional_test(const Column& x, const Column& y, const std::vector<Column>& z,
                           const KernelCiConfig& cfg = {});

// Low-rank factor G with G G^T approximating the kernel matrix of the rows of `data`.
// Exposed for tests.
Eigen::MatrixXd gaussian_factor(const Eigen::MatrixXd& data, double bandwidth, std::size_t max_rank, double tol);
double median_bandwidth(const Eigen::MatrixXd& data, std::size_t max_rows, std::uint64_t seed);

}  // namespace gisl
