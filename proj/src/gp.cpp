#include "cointopo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cointopo {

namespace {

constexpr double kLogParamMin = -15.0;
constexpr double kLogParamMax = 15.0;
constexpr double kJitter = 1e-10;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const GpParams& p) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    Eigen::MatrixXd K(n, n);
    std::vector<double> inv2(d);
    for (int k = 0; k < d; ++k) inv2[k] = std::exp(-2.0 * p.log_lengthscales[k]);
    const double sf2 = std::exp(p.log_kernel_variance);
    for (int i = 0; i < n; ++i) {
        K(i, i) = sf2;
        for (int j = i + 1; j < n; ++j) {
            double q = 0.0;
            for (int k = 0; k < d; ++k) {
                const double r = X(i, k) - X(j, k);
                q += r * r * inv2[k];
            }
            const double v = sf2 * std::exp(-0.5 * q);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::VectorXd cross_kernel_row(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                                 const std::vector<double>& ls, double sf2) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) {
        double q = 0.0;
        for (int c = 0; c < d; ++c) {
            const double r = (X(i, c) - x(c)) / ls[c];
            q += r * r;
        }
        k(i) = sf2 * std::exp(-0.5 * q);
    }
    return k;
}

struct Standardizer {
    Eigen::VectorXd mean, scale;

    static Standardizer fit(const Eigen::MatrixXd& X) {
        Standardizer s;
        const int d = static_cast<int>(X.cols());
        s.mean = X.colwise().mean();
        s.scale.resize(d);
        const double n = static_cast<double>(X.rows());
        for (int c = 0; c < d; ++c) {
            const double var = (X.col(c).array() - s.mean(c)).square().sum() /
                               std::max(n - 1.0, 1.0);
            s.scale(c) = var > 0.0 ? std::sqrt(var) : 1.0;
        }
        return s;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
        return (X.rowwise() - mean.transpose()).array().rowwise() /
               scale.transpose().array();
    }
};

}  // namespace

double gp_log_marginal(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                       const GpParams& params, std::vector<double>* grad) {
    const int n = static_cast<int>(inputs.rows());
    const int d = static_cast<int>(inputs.cols());
    if (static_cast<int>(params.log_lengthscales.size()) != d) {
        throw ShapeError("gp_log_marginal: lengthscale count does not match input dim");
    }
    const double sf2 = std::exp(params.log_kernel_variance);
    const double sn2 = std::exp(params.log_noise_variance);

    Eigen::MatrixXd Kf = kernel_matrix(inputs, params);
    Eigen::MatrixXd K = Kf;
    K.diagonal().array() += sn2 + kJitter * sf2;

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) {
        return -std::numeric_limits<double>::infinity();
    }
    Eigen::VectorXd alpha = llt.solve(targets);
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(llt.matrixLLT()(i, i));
    const double lml = -0.5 * targets.dot(alpha) - log_det -
                       0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
    if (!std::isfinite(lml)) return -std::numeric_limits<double>::infinity();
    if (grad == nullptr) return lml;

    // dL/dtheta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    Eigen::MatrixXd Kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd W = alpha * alpha.transpose() - Kinv;

    grad->assign(static_cast<std::size_t>(d) + 2, 0.0);
    for (int k = 0; k < d; ++k) {
        const double inv2 = std::exp(-2.0 * params.log_lengthscales[k]);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double r = inputs(i, k) - inputs(j, k);
                acc += W(i, j) * Kf(i, j) * r * r * inv2;  // symmetric, diagonal term is 0
            }
        }
        (*grad)[static_cast<std::size_t>(k)] = acc;  // 0.5 * 2 * upper triangle
    }
    (*grad)[static_cast<std::size_t>(d)] = 0.5 * W.cwiseProduct(Kf).sum();
    (*grad)[static_cast<std::size_t>(d) + 1] = 0.5 * sn2 * W.trace();
    return lml;
}

GpModel fit_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
               const GpConfig& config) {
    const int n = static_cast<int>(inputs.rows());
    const int d = static_cast<int>(inputs.cols());
    if (n != static_cast<int>(targets.size())) {
        throw ShapeError("fit_gp: inputs and targets disagree on sample count");
    }
    if (d < 1) throw ShapeError("fit_gp: inputs need at least one column");
    if (n < d + 2) {
        throw DataError("fit_gp: need at least dim+2 training points, got " +
                        std::to_string(n));
    }

    GpModel model;
    Standardizer in_std = Standardizer::fit(inputs);
    model.input_mean = in_std.mean;
    model.input_scale = in_std.scale;
    model.train_inputs = in_std.apply(inputs);
    model.target_mean = targets.mean();
    {
        const double var = (targets.array() - model.target_mean).square().sum() /
                           std::max(static_cast<double>(n) - 1.0, 1.0);
        model.target_scale = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    model.train_targets = (targets.array() - model.target_mean) / model.target_scale;

    const Eigen::MatrixXd& X = model.train_inputs;
    const Eigen::VectorXd& y = model.train_targets;

    auto objective = [&](const GpParams& p, std::vector<double>* g) {
        return gp_log_marginal(X, y, p, g);
    };

    // Log-space parameter vector layout: [log ls_0..d-1, log sf2, log sn2].
    const int np = d + 2;
    auto to_params = [&](const std::vector<double>& theta) {
        GpParams p;
        p.log_lengthscales.assign(theta.begin(), theta.begin() + d);
        p.log_kernel_variance = theta[static_cast<std::size_t>(d)];
        p.log_noise_variance = theta[static_cast<std::size_t>(d) + 1];
        return p;
    };
    auto eval = [&](const std::vector<double>& theta, std::vector<double>* g) {
        return objective(to_params(theta), g);
    };
    auto clamp_theta = [&](std::vector<double>& theta) {
        for (double& v : theta) v = std::clamp(v, kLogParamMin, kLogParamMax);
    };

    std::mt19937_64 rng(config.seed);
    std::vector<double> best_theta;
    double best_lml = -std::numeric_limits<double>::infinity();
    bool any_finite = false;
    model.start_log_marginals.clear();

    for (int s = 0; s < std::max(config.multi_starts, 1); ++s) {
        std::vector<double> theta(static_cast<std::size_t>(np), 0.0);
        theta[static_cast<std::size_t>(d) + 1] = std::log(0.1);
        if (s > 0) {
            // Log-uniform perturbations around the heuristic start.
            for (int k = 0; k < d; ++k) {
                theta[static_cast<std::size_t>(k)] =
                    std::log(0.1) + uniform01(rng) * (std::log(10.0) - std::log(0.1));
            }
            theta[static_cast<std::size_t>(d)] =
                std::log(0.1) + uniform01(rng) * (std::log(10.0) - std::log(0.1));
            theta[static_cast<std::size_t>(d) + 1] =
                std::log(1e-4) + uniform01(rng) * (std::log(1.0) - std::log(1e-4));
        }

        std::vector<double> grad;
        double lml = eval(theta, &grad);
        model.start_log_marginals.push_back(lml);
        if (!std::isfinite(lml)) continue;
        any_finite = true;

        // Ascent with L-BFGS curvature pairs and a backtracking line search.
        // The line search evaluates the objective only; the gradient is
        // recomputed on acceptance.
        constexpr int kMemory = 8;
        std::vector<std::vector<double>> s_hist, y_hist;
        std::vector<double> rho_hist;

        for (int iter = 0; iter < config.max_iterations; ++iter) {
            double gmax = 0.0;
            for (double g : grad) gmax = std::max(gmax, std::abs(g));
            if (gmax < config.grad_tol) break;

            // Two-loop recursion on the descent problem for -lml.
            std::vector<double> q(grad.size());
            for (std::size_t k = 0; k < grad.size(); ++k) q[k] = -grad[k];
            const int m = static_cast<int>(s_hist.size());
            std::vector<double> a(static_cast<std::size_t>(m));
            for (int i = m - 1; i >= 0; --i) {
                double si_q = 0.0;
                for (std::size_t k = 0; k < q.size(); ++k) si_q += s_hist[i][k] * q[k];
                a[static_cast<std::size_t>(i)] = rho_hist[static_cast<std::size_t>(i)] * si_q;
                for (std::size_t k = 0; k < q.size(); ++k) {
                    q[k] -= a[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)][k];
                }
            }
            if (m > 0) {
                double sy = 0.0, yy = 0.0;
                for (std::size_t k = 0; k < q.size(); ++k) {
                    sy += s_hist[m - 1][k] * y_hist[m - 1][k];
                    yy += y_hist[m - 1][k] * y_hist[m - 1][k];
                }
                const double gamma = yy > 0.0 ? sy / yy : 1.0;
                for (double& v : q) v *= gamma;
            }
            for (int i = 0; i < m; ++i) {
                double yi_q = 0.0;
                for (std::size_t k = 0; k < q.size(); ++k) yi_q += y_hist[static_cast<std::size_t>(i)][k] * q[k];
                const double b = rho_hist[static_cast<std::size_t>(i)] * yi_q;
                for (std::size_t k = 0; k < q.size(); ++k) {
                    q[k] += (a[static_cast<std::size_t>(i)] - b) * s_hist[static_cast<std::size_t>(i)][k];
                }
            }
            // Ascent direction; fall back to the raw gradient if not uphill.
            std::vector<double> dir(q.size());
            double slope = 0.0;
            for (std::size_t k = 0; k < q.size(); ++k) {
                dir[k] = -q[k];
                slope += dir[k] * grad[k];
            }
            if (!(slope > 0.0)) {
                dir = grad;
                slope = 0.0;
                for (double g : grad) slope += g * g;
            }

            bool accepted = false;
            double t = 1.0;
            while (t > 1e-14) {
                std::vector<double> trial = theta;
                for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += t * dir[k];
                clamp_theta(trial);
                const double trial_lml = eval(trial, nullptr);
                if (std::isfinite(trial_lml) && trial_lml > lml + 1e-4 * t * slope) {
                    std::vector<double> trial_grad;
                    const double confirmed = eval(trial, &trial_grad);
                    std::vector<double> s_k(trial.size()), y_k(trial.size());
                    double sy = 0.0;
                    for (std::size_t k = 0; k < trial.size(); ++k) {
                        s_k[k] = trial[k] - theta[k];
                        y_k[k] = -(trial_grad[k] - grad[k]);  // gradient of -lml
                        sy += s_k[k] * y_k[k];
                    }
                    if (sy > 1e-12) {
                        s_hist.push_back(std::move(s_k));
                        y_hist.push_back(std::move(y_k));
                        rho_hist.push_back(1.0 / sy);
                        if (static_cast<int>(s_hist.size()) > kMemory) {
                            s_hist.erase(s_hist.begin());
                            y_hist.erase(y_hist.begin());
                            rho_hist.erase(rho_hist.begin());
                        }
                    }
                    theta = std::move(trial);
                    lml = confirmed;
                    grad = std::move(trial_grad);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) break;
        }

        if (lml > best_lml) {
            best_lml = lml;
            best_theta = theta;
        }
    }
    if (!any_finite) {
        throw NumericalError("fit_gp: non-finite likelihood at every start point");
    }
    GpParams best_params = to_params(best_theta);

    model.lengthscales.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        model.lengthscales[static_cast<std::size_t>(k)] =
            std::exp(best_params.log_lengthscales[static_cast<std::size_t>(k)]);
    }
    model.kernel_variance = std::exp(best_params.log_kernel_variance);
    model.noise_variance = std::exp(best_params.log_noise_variance);
    model.log_marginal = best_lml;

    Eigen::MatrixXd K = kernel_matrix(X, best_params);
    K.diagonal().array() += model.noise_variance + kJitter * model.kernel_variance;
    model.factorization.compute(K);
    if (model.factorization.info() != Eigen::Success) {
        throw NumericalError("fit_gp: final kernel matrix is not positive definite");
    }
    model.alpha = model.factorization.solve(y);
    return model;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> predict(const GpModel& model,
                                                    const Eigen::MatrixXd& inputs) {
    if (static_cast<int>(inputs.cols()) != model.input_dim()) {
        throw ShapeError("predict: input dim " + std::to_string(inputs.cols()) +
                         " does not match model dim " + std::to_string(model.input_dim()));
    }
    const int m = static_cast<int>(inputs.rows());
    Eigen::MatrixXd Xs = (inputs.rowwise() - model.input_mean.transpose()).array().rowwise() /
                         model.input_scale.transpose().array();

    Eigen::VectorXd mean(m), var(m);
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd ks = cross_kernel_row(model.train_inputs, Xs.row(i).transpose(),
                                              model.lengthscales, model.kernel_variance);
        mean(i) = ks.dot(model.alpha);
        Eigen::VectorXd w = model.factorization.solve(ks);
        var(i) = std::max(model.kernel_variance - ks.dot(w), 0.0);
    }
    mean = (mean.array() * model.target_scale + model.target_mean).matrix();
    var = (var.array() * model.target_scale * model.target_scale).matrix();
    return {mean, var};
}

TimeSeries gp_residuals(const MultiSeries& ms, const std::string& target,
                        const std::vector<std::string>& regressors, IndexRange train_window,
                        const GpConfig& config, GpModel* fitted) {
    if (regressors.empty()) throw ParamError("gp_residuals: need at least one regressor");
    for (const auto& r : regressors) {
        if (r == target) {
            throw ParamError("gp_residuals: target '" + target + "' is also a regressor");
        }
    }
    const std::size_t n = ms.length();
    if (train_window.end > n || train_window.start >= train_window.end) {
        throw ParamError("gp_residuals: train window out of bounds");
    }
    const TimeSeries& ty = ms.channel(target);
    const std::size_t w = train_window.length();
    const std::size_t d = regressors.size();
    if (w < d + 2) {
        throw DataError("gp_residuals: train window of " + std::to_string(w) +
                        " points is too short");
    }

    Eigen::MatrixXd Xw(static_cast<int>(w), static_cast<int>(d));
    Eigen::VectorXd yw(static_cast<int>(w));
    Eigen::MatrixXd Xall(static_cast<int>(n), static_cast<int>(d));
    for (std::size_t c = 0; c < d; ++c) {
        const TimeSeries& reg = ms.channel(regressors[c]);
        for (std::size_t t = 0; t < n; ++t) {
            Xall(static_cast<int>(t), static_cast<int>(c)) = reg.values[t];
        }
    }
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t src = train_window.start + t;
        Xw.row(static_cast<int>(t)) = Xall.row(static_cast<int>(src));
        yw(static_cast<int>(t)) = ty.values[src];
    }

    GpModel model = fit_gp(Xw, yw, config);
    auto [mean, var] = predict(model, Xall);
    (void)var;

    TimeSeries out;
    out.label = target + ".gp_resid";
    out.values.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.values[t] = ty.values[t] - mean(static_cast<int>(t));
    }
    if (fitted != nullptr) *fitted = std::move(model);
    return out;
}

}  // namespace cointopo
