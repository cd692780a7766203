#pragma once

#include <Eigen/Dense>
#include <span>

#include "bubble/deterministic.hpp"
#include "bubble/regress.hpp"

namespace bubble::detail {

struct AdfRegressionResult {
    double t_stat = 0.0;  // t-ratio on the lagged level
    double rss = 0.0;
    int n_eff = 0;
    int n_params = 0;
};

/// Dickey-Fuller regression
///   dy_t = deterministics + phi * y_{t-1} + sum_{i<=lags} psi_i * dy_{t-i} + e_t
/// estimated on t = first_obs .. y.size()-1 (0-based). first_obs >= lags + 1.
AdfRegressionResult adf_regression(std::span<const double> y, DeterministicSpec spec,
                                   int lags, int first_obs);

}  // namespace bubble::detail
