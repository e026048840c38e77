#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "cointopo/series.hpp"

namespace cointopo {

struct GpConfig {
    int multi_starts = 5;
    int max_iterations = 200;
    double grad_tol = 1e-5;     // infinity norm of the log-space gradient
    std::uint64_t seed = 42;    // start-point perturbations
};

/// Log-space hyperparameters of the squared-exponential kernel with
/// per-dimension lengthscales plus observation noise.
struct GpParams {
    std::vector<double> log_lengthscales;
    double log_kernel_variance = 0.0;
    double log_noise_variance = 0.0;
};

/// Fitted model. Inputs and targets are standardized internally at fit time;
/// predictions come back on the original target scale.
struct GpModel {
    Eigen::MatrixXd train_inputs;   // standardized, n x d
    Eigen::VectorXd train_targets;  // standardized
    std::vector<double> lengthscales;  // standardized input space
    double kernel_variance = 1.0;
    double noise_variance = 1.0;
    double log_marginal = 0.0;
    std::vector<double> start_log_marginals;  // objective at each start point

    // Cached factorization state for (K + noise*I).
    Eigen::LLT<Eigen::MatrixXd> factorization;
    Eigen::VectorXd alpha;

    // Standardization applied at fit time.
    Eigen::VectorXd input_mean, input_scale;
    double target_mean = 0.0, target_scale = 1.0;

    int input_dim() const { return static_cast<int>(train_inputs.cols()); }
};

/// Log marginal likelihood of standardized data at the given hyperparameters;
/// fills the analytic log-space gradient when `grad` is non-null. Returns
/// -infinity when the kernel matrix is not positive definite.
double gp_log_marginal(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                       const GpParams& params, std::vector<double>* grad = nullptr);

/// Maximizes the log marginal likelihood by multi-start gradient ascent with
/// a backtracking line search in log space.
GpModel fit_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
               const GpConfig& config = {});

/// Posterior mean and variance (original scales) at the given inputs.
std::pair<Eigen::VectorXd, Eigen::VectorXd> predict(const GpModel& model,
                                                    const Eigen::MatrixXd& inputs);

/// Half-open index window into a MultiSeries.
struct IndexRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end > start ? end - start : 0; }
};

/// Fits a GP predicting `target` from `regressors` over `train_window`, then
/// returns target - prediction over every index, on the original scale.
TimeSeries gp_residuals(const MultiSeries& ms, const std::string& target,
                        const std::vector<std::string>& regressors, IndexRange train_window,
                        const GpConfig& config = {}, GpModel* fitted = nullptr);

}  // namespace cointopo
