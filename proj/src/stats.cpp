#include "bubble/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bubble {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty range");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x, int ddof) {
    if (x.size() <= static_cast<std::size_t>(ddof))
        throw std::invalid_argument("variance needs more observations than ddof");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - ddof);
}

double stddev(std::span<const double> x, int ddof) { return std::sqrt(variance(x, ddof)); }

double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median of empty range");
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty range");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double quantile_lower_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty range");
    if (p <= 0.0) return sorted.front();
    const double n = static_cast<double>(sorted.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * n));
    if (rank == 0) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double normal_ppf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_ppf requires p in (0,1)");

    // Acklam's approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the exact CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double two_sided_normal_p(double t) { return std::erfc(std::abs(t) * M_SQRT1_2); }

double bartlett_long_run_variance(std::span<const double> u, int lag) {
    const std::size_t n = u.size();
    if (n == 0) throw std::invalid_argument("empty residual vector");
    if (lag < 0 || static_cast<std::size_t>(lag) >= n)
        throw std::invalid_argument("long-run variance lag must satisfy 0 <= L < n");
    double lrv = 0.0;
    for (double v : u) lrv += v * v;
    lrv /= static_cast<double>(n);
    for (int j = 1; j <= lag; ++j) {
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t)
            gamma += u[t] * u[t - j];
        gamma /= static_cast<double>(n);
        const double w = 1.0 - static_cast<double>(j) / static_cast<double>(lag + 1);
        lrv += 2.0 * w * gamma;
    }
    return lrv;
}

int newey_west_auto_lag(std::size_t n) {
    return static_cast<int>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

KsResult ks_test(std::vector<double> x, double (*cdf)(double)) {
    if (x.empty()) throw std::invalid_argument("ks_test on empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    // Asymptotic Kolmogorov tail sum.
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    p = std::clamp(2.0 * p, 0.0, 1.0);
    return {d, p};
}

double hill_tail_index(std::vector<double> x, std::size_t k) {
    for (double& v : x) v = std::abs(v);
    if (k < 2 || k >= x.size())
        throw std::invalid_argument("hill_tail_index requires 2 <= k < n");
    std::sort(x.begin(), x.end(), std::greater<>());
    const double x_k = x[k];  // (k+1)-th largest, the threshold
    if (x_k <= 0.0) throw std::invalid_argument("hill_tail_index needs positive order statistics");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / x_k);
    return static_cast<double>(k) / s;
}

}  // namespace bubble
