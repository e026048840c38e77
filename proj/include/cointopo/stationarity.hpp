#pragma once

#include <array>
#include <string>

#include "cointopo/series.hpp"

namespace cointopo {

/// Least-squares fit of the error-correction regression
///   dy_t = rho * y_{t-1} + sum_j b_j * dy_{t-j} + c + e_t
/// with j = 1..lags and an optional intercept c.
struct EcmFit {
    double rho_hat = 0.0;
    std::vector<double> b;      // lagged-difference coefficients, j = 1..lags
    double intercept = 0.0;     // 0 when fitted without intercept
    double sigma_rho = 0.0;     // OLS standard error of rho_hat
    TimeSeries residuals;       // fit residuals e_t, length n_used
    int n_used = 0;
};

/// Left-tailed unit-root test: reject when t_stat < critical value.
struct AdfResult {
    static constexpr std::array<int, 3> levels{1, 5, 10};

    double t_stat = 0.0;                       // rho_hat / sigma_rho
    int lags = 0;
    int n_used = 0;
    std::array<double, 3> critical_values{};   // at 1%, 5%, 10%
    std::array<bool, 3> reject_unit_root{};

    double critical_value(int level) const;
    bool rejects(int level) const;
};

/// Fits the error-correction regression by OLS. Throws NumericalError on a
/// rank-deficient design and DataError when the system is not overdetermined.
EcmFit fit_ecm(const TimeSeries& ts, int lags, bool with_intercept = true);

/// Augmented Dickey-Fuller test (constant, no trend by default). Critical
/// values come from the embedded reference table, interpolated in 1/n.
AdfResult adf_test(const TimeSeries& ts, int lags, bool with_intercept = true);

/// adf_test with the default lag count schwert_lags(ts.size()).
AdfResult adf_test(const TimeSeries& ts);

/// Smallest k <= max_order such that the k-times differenced series rejects
/// the unit root at `level` percent. Throws DataError if no such k exists.
int integration_order(const TimeSeries& ts, int max_order, int lags, int level);

/// Default lag rule: floor(12 * (n/100)^(1/4)).
int schwert_lags(std::size_t n);

/// Reference critical values at a given effective sample size.
std::array<double, 3> dickey_fuller_critical_values(int n);

/// The embedded reference table as CSV text, for audit export.
std::string dickey_fuller_table_csv();

}  // namespace cointopo
