#include "cointopo/johansen.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cointopo {

namespace {

// Least-squares residual of each column of Y on the columns of X.
Eigen::MatrixXd regress_out(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X) {
    if (X.cols() == 0) return Y;
    Eigen::MatrixXd coef = X.colPivHouseholderQr().solve(Y);
    return Y - X * coef;
}

// Symmetric inverse square root; throws on a numerically singular input.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& S, const char* name) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double tol = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    if (ev.minCoeff() <= tol) {
        throw NumericalError(std::string("johansen: collinear channels (singular ") + name +
                             ")");
    }
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace

JohansenResult johansen(const MultiSeries& ms, int lag) {
    const int m = static_cast<int>(ms.channel_count());
    const int n = static_cast<int>(ms.length());
    if (m < 2) throw DataError("johansen: need at least 2 channels");
    if (lag < 1) throw ParamError("johansen: lag must be >= 1");
    if (n < 10 * m) {
        throw DataError("johansen: series length " + std::to_string(n) +
                        " below adequacy guard 10*channels");
    }
    for (const auto& ch : ms.channels) {
        if (ch.size() != static_cast<std::size_t>(n)) {
            throw ShapeError("johansen: channels differ in length");
        }
    }

    // Levels as rows t = 0..n-1, columns = channels.
    Eigen::MatrixXd Y(n, m);
    for (int c = 0; c < m; ++c) {
        for (int t = 0; t < n; ++t) Y(t, c) = ms.channels[c].values[t];
    }
    Eigen::MatrixXd dY = Y.bottomRows(n - 1) - Y.topRows(n - 1);  // dy_t, t = 1..n-1

    // Regression rows t = lag..n-1.
    const int T = n - lag;
    Eigen::MatrixXd Z0(T, m);  // dy_t
    Eigen::MatrixXd Z1(T, m);  // y_{t-1}
    const int n_aux = (lag - 1) * m + 1;
    Eigen::MatrixXd Z2(T, n_aux);  // lagged differences + intercept
    for (int r = 0; r < T; ++r) {
        const int t = lag + r;
        Z0.row(r) = dY.row(t - 1);
        Z1.row(r) = Y.row(t - 1);
        for (int j = 1; j < lag; ++j) {
            Z2.block(r, (j - 1) * m, 1, m) = dY.row(t - 1 - j);
        }
        Z2(r, n_aux - 1) = 1.0;
    }

    Eigen::MatrixXd R0 = regress_out(Z0, Z2);
    Eigen::MatrixXd R1 = regress_out(Z1, Z2);

    const double scale = 1.0 / static_cast<double>(T);
    Eigen::MatrixXd S00 = scale * R0.transpose() * R0;
    Eigen::MatrixXd S01 = scale * R0.transpose() * R1;
    Eigen::MatrixXd S11 = scale * R1.transpose() * R1;

    Eigen::MatrixXd S00_inv_sqrt = inverse_sqrt(S00, "S00");
    Eigen::MatrixXd S11_inv_sqrt = inverse_sqrt(S11, "S11");

    // lambda S11 b = S10 S00^{-1} S01 b, whitened to a symmetric problem.
    Eigen::MatrixXd A = S00_inv_sqrt * S01 * S11_inv_sqrt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);

    JohansenResult out;
    out.lag = lag;
    out.eigenvalues.resize(m);
    out.vectors.assign(m, std::vector<double>(m));
    const double one_minus = std::nextafter(1.0, 0.0);
    for (int i = 0; i < m; ++i) {
        const int src = m - 1 - i;  // solver returns ascending order
        double lambda = es.eigenvalues()(src);
        out.eigenvalues[i] = std::clamp(lambda, 0.0, one_minus);
        Eigen::VectorXd beta = S11_inv_sqrt * es.eigenvectors().col(src);
        beta.normalize();
        for (int k = 0; k < m; ++k) {
            if (std::abs(beta(k)) > 1e-12) {
                if (beta(k) < 0) beta = -beta;
                break;
            }
        }
        for (int k = 0; k < m; ++k) out.vectors[i][k] = beta(k);
    }
    return out;
}

TimeSeries residual_series(const MultiSeries& ms, const std::vector<double>& beta) {
    if (beta.size() != ms.channel_count()) {
        throw ShapeError("residual_series: beta has " + std::to_string(beta.size()) +
                         " entries for " + std::to_string(ms.channel_count()) + " channels");
    }
    TimeSeries out;
    out.label = "resid";
    const std::size_t n = ms.length();
    out.values.resize(n, 0.0);
    for (std::size_t c = 0; c < beta.size(); ++c) {
        const auto& vals = ms.channels[c].values;
        for (std::size_t t = 0; t < n; ++t) out.values[t] += beta[c] * vals[t];
    }
    return out;
}

}  // namespace cointopo
