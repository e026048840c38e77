#include "cointopo/stationarity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cointopo {

namespace {

// Dickey-Fuller critical values, constant case (no trend), left tail.
// Rows are finite sample sizes plus the asymptotic limit; interpolation is
// linear in 1/n with the limit at 1/n = 0.
struct CvRow {
    int n;  // 0 encodes the asymptotic row
    double cv1, cv5, cv10;
};

constexpr CvRow kDickeyFullerConstant[] = {
    {25, -3.75, -3.00, -2.63},
    {50, -3.58, -2.93, -2.60},
    {100, -3.51, -2.89, -2.58},
    {250, -3.46, -2.88, -2.57},
    {500, -3.44, -2.87, -2.57},
    {0, -3.43, -2.86, -2.57},
};

constexpr int kRowCount = static_cast<int>(std::size(kDickeyFullerConstant));

}  // namespace

std::array<double, 3> dickey_fuller_critical_values(int n) {
    if (n <= kDickeyFullerConstant[0].n) {
        const auto& r = kDickeyFullerConstant[0];
        return {r.cv1, r.cv5, r.cv10};
    }
    const double x = 1.0 / static_cast<double>(n);
    // Rows are ordered by decreasing 1/n; the last row sits at 1/n = 0.
    for (int i = 0; i + 1 < kRowCount; ++i) {
        const auto& hi = kDickeyFullerConstant[i];
        const auto& lo = kDickeyFullerConstant[i + 1];
        const double x_hi = 1.0 / static_cast<double>(hi.n);
        const double x_lo = lo.n == 0 ? 0.0 : 1.0 / static_cast<double>(lo.n);
        if (x <= x_hi && x >= x_lo) {
            const double w = (x - x_lo) / (x_hi - x_lo);
            return {w * hi.cv1 + (1.0 - w) * lo.cv1, w * hi.cv5 + (1.0 - w) * lo.cv5,
                    w * hi.cv10 + (1.0 - w) * lo.cv10};
        }
    }
    const auto& r = kDickeyFullerConstant[kRowCount - 1];
    return {r.cv1, r.cv5, r.cv10};
}

std::string dickey_fuller_table_csv() {
    std::ostringstream out;
    out << "n,cv_1pct,cv_5pct,cv_10pct\n";
    for (const auto& r : kDickeyFullerConstant) {
        if (r.n == 0) {
            out << "inf";
        } else {
            out << r.n;
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), ",%.2f,%.2f,%.2f\n", r.cv1, r.cv5, r.cv10);
        out << buf;
    }
    return out.str();
}

int schwert_lags(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

EcmFit fit_ecm(const TimeSeries& ts, int lags, bool with_intercept) {
    if (lags < 0) throw ParamError("fit_ecm: lags must be nonnegative");
    const int n = static_cast<int>(ts.size());
    const int k = 1 + lags + (with_intercept ? 1 : 0);  // rho + lag diffs + intercept
    if (n < lags + 2 + k) {
        throw DataError("fit_ecm: series of length " + std::to_string(n) +
                        " too short for " + std::to_string(lags) + " lags");
    }

    // dy_t for t = 1..n-1; regression rows are t = lags+1 .. n-1.
    std::vector<double> dy(n - 1);
    for (int t = 1; t < n; ++t) dy[t - 1] = ts.values[t] - ts.values[t - 1];

    const int rows = n - 1 - lags;
    Eigen::MatrixXd X(rows, k);
    Eigen::VectorXd z(rows);
    for (int r = 0; r < rows; ++r) {
        const int t = lags + 1 + r;
        z(r) = dy[t - 1];
        X(r, 0) = ts.values[t - 1];
        for (int j = 1; j <= lags; ++j) X(r, j) = dy[t - 1 - j];
        if (with_intercept) X(r, k - 1) = 1.0;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        throw NumericalError("fit_ecm: rank-deficient design matrix (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
    }
    Eigen::VectorXd beta = qr.solve(z);
    Eigen::VectorXd resid = z - X * beta;

    const double s2 = resid.squaredNorm() / static_cast<double>(rows - k);
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    EcmFit fit;
    fit.rho_hat = beta(0);
    fit.b.assign(beta.data() + 1, beta.data() + 1 + lags);
    fit.intercept = with_intercept ? beta(k - 1) : 0.0;
    fit.sigma_rho = std::sqrt(s2 * xtx_inv(0, 0));
    fit.residuals.label = ts.label + ".ecm_resid";
    fit.residuals.values.assign(resid.data(), resid.data() + rows);
    fit.n_used = rows;
    if (!(fit.sigma_rho > 0.0) || !std::isfinite(fit.sigma_rho)) {
        throw NumericalError("fit_ecm: degenerate standard error for rho");
    }
    return fit;
}

double AdfResult::critical_value(int level) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == level) return critical_values[i];
    }
    throw ParamError("adf: unsupported significance level " + std::to_string(level));
}

bool AdfResult::rejects(int level) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == level) return reject_unit_root[i];
    }
    throw ParamError("adf: unsupported significance level " + std::to_string(level));
}

AdfResult adf_test(const TimeSeries& ts, int lags, bool with_intercept) {
    EcmFit fit = fit_ecm(ts, lags, with_intercept);
    AdfResult res;
    res.t_stat = fit.rho_hat / fit.sigma_rho;
    res.lags = lags;
    res.n_used = fit.n_used;
    res.critical_values = dickey_fuller_critical_values(fit.n_used);
    for (std::size_t i = 0; i < res.levels.size(); ++i) {
        res.reject_unit_root[i] = res.t_stat < res.critical_values[i];
    }
    return res;
}

AdfResult adf_test(const TimeSeries& ts) {
    return adf_test(ts, schwert_lags(ts.size()));
}

int integration_order(const TimeSeries& ts, int max_order, int lags, int level) {
    if (max_order < 0) throw ParamError("integration_order: max_order must be nonnegative");
    for (int k = 0; k <= max_order; ++k) {
        TimeSeries d = difference(ts, k);
        if (adf_test(d, lags).rejects(level)) return k;
    }
    throw DataError("integration_order: order undetermined up to max_order " +
                    std::to_string(max_order));
}

}  // namespace cointopo
