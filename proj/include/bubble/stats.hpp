#pragma once

#include <span>
#include <vector>

namespace bubble {

double mean(std::span<const double> x);
double variance(std::span<const double> x, int ddof = 1);
double stddev(std::span<const double> x, int ddof = 1);
double median(std::vector<double> x);  // by value: sorts a copy

/// Linear-interpolation quantile (the common "type 7" rule); `sorted` must be
/// ascending, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Left-continuous inverse CDF: the smallest u with P_n(X <= u) >= p, i.e.
/// the ceil(p*n)-th order statistic.
double quantile_lower_sorted(std::span<const double> sorted, double p);

double normal_cdf(double x);
double normal_pdf(double x);
/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; absolute error below 1e-13).
double normal_ppf(double p);
/// Two-sided p-value of a t statistic against the normal reference.
double two_sided_normal_p(double t);

/// Bartlett-kernel long-run variance: gamma_0 + 2 * sum_{j<=L} (1-j/(L+1)) gamma_j
/// with gamma_j = (1/n) sum u_t u_{t-j}.
double bartlett_long_run_variance(std::span<const double> u, int lag);

/// Newey-West automatic truncation: floor(4 * (n/100)^{2/9}).
int newey_west_auto_lag(std::size_t n);

/// Two-sided Kolmogorov-Smirnov statistic of `x` against a continuous CDF
/// given as callable, plus the asymptotic p-value.
struct KsResult {
    double statistic;
    double p_value;
};
KsResult ks_test(std::vector<double> x, double (*cdf)(double));

/// Hill tail-index estimate from the top `k` order statistics of |x|.
double hill_tail_index(std::vector<double> x, std::size_t k);

}  // namespace bubble
