#pragma once

#include <vector>

#include "cointopo/series.hpp"

namespace cointopo {

/// Output of the Johansen eigenproblem. Eigenvalues are sorted descending;
/// each vector is normalized to unit Euclidean norm with its first nonzero
/// entry positive, so repeated runs are bit-identical.
struct JohansenResult {
    std::vector<double> eigenvalues;            // in [0,1), descending
    std::vector<std::vector<double>> vectors;   // vectors[i] pairs with eigenvalues[i]
    int lag = 1;

    /// Vector of the largest eigenvalue (the most stationary combination).
    const std::vector<double>& leading_vector() const { return vectors.front(); }
};

/// Reduced-rank regression: regress dy_t and y_{t-1} on lag-1 lagged
/// differences plus an intercept, form the residual product-moment matrices
/// and solve the generalized eigenproblem. `lag` is the VECM lag; lag = 1
/// means no lagged-difference regressors.
JohansenResult johansen(const MultiSeries& ms, int lag = 1);

/// z(t) = beta . y(t), the combination series for one cointegrating vector.
TimeSeries residual_series(const MultiSeries& ms, const std::vector<double>& beta);

}  // namespace cointopo
