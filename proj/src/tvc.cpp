#include "bubble/tvc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bubble/errors.hpp"
#include "bubble/parallel.hpp"
#include "bubble/rng.hpp"
#include "bubble/stats.hpp"

namespace bubble {

double epanechnikov(double x) {
    return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
}

double kernel_eval(KernelType kernel, double x) {
    switch (kernel) {
        case KernelType::epanechnikov: return epanechnikov(x);
    }
    return 0.0;
}

double oversmooth_bandwidth(double h) {
    if (!(h > 0.0 && h < 1.0))
        throw std::invalid_argument("oversmooth_bandwidth: h must lie in (0,1)");
    return 0.5 * std::pow(h, 5.0 / 9.0);
}

double awb_default_gamma(int n) {
    const int l_star = static_cast<int>(
        std::ceil(1.75 * std::cbrt(static_cast<double>(n))));
    return std::pow(0.01, 1.0 / static_cast<double>(l_star));
}

struct LocalLinearPlan::Impl {
    Eigen::MatrixXd X;
    double h = 0.0;
    KernelType kernel = KernelType::epanechnikov;
    std::vector<double> grid;
    bool sample_grid = false;  // grid == (t+1)/n for all t

    struct TauPlan {
        int lo = 0;                // first sample row in the kernel window
        int hi = 0;                // one past the last
        Eigen::MatrixXd solver;    // 2k x (hi-lo): theta = solver * y[lo:hi]
        bool boundary = false;
    };
    std::vector<TauPlan> taus;

    double u(int t) const {
        return static_cast<double>(t + 1) / static_cast<double>(X.rows());
    }

    // Weighted local design around tau, optionally excluding rows
    // [excl_lo, excl_hi]. Returns false when rank deficient.
    bool accumulate(double tau, int excl_lo, int excl_hi, Eigen::MatrixXd& A,
                    Eigen::MatrixXd* zw) const {
        const int n = static_cast<int>(X.rows());
        const int k = static_cast<int>(X.cols());
        const int q = 2 * k;
        const int lo = window_lo(tau);
        const int hi = window_hi(tau);
        A.setZero(q, q);
        if (zw) zw->setZero(q, hi - lo);
        Eigen::VectorXd z(q);
        for (int t = lo; t < hi; ++t) {
            if (t >= excl_lo && t <= excl_hi) continue;
            const double w = kernel_eval(kernel, (u(t) - tau) / h);
            if (w <= 0.0) continue;
            z.head(k) = X.row(t);
            z.tail(k) = X.row(t) * (u(t) - tau);
            A.noalias() += w * z * z.transpose();
            if (zw) zw->col(t - lo) = w * z;
        }
        (void)n;
        Eigen::LDLT<Eigen::MatrixXd> probe(A);
        if (probe.info() != Eigen::Success) return false;
        const Eigen::VectorXd d = probe.vectorD();
        const double dmax = d.maxCoeff();
        return dmax > 0.0 && d.minCoeff() > 1e-11 * dmax;
    }

    int window_lo(double tau) const {
        const int n = static_cast<int>(X.rows());
        // smallest t with (t+1)/n >= tau - h
        int lo = static_cast<int>(std::ceil((tau - h) * n)) - 1;
        return std::clamp(lo, 0, n);
    }

    int window_hi(double tau) const {
        const int n = static_cast<int>(X.rows());
        // one past the largest t with (t+1)/n <= tau + h
        int hi = static_cast<int>(std::floor((tau + h) * n));
        return std::clamp(hi, 0, n);
    }
};

LocalLinearPlan::LocalLinearPlan(const Eigen::MatrixXd& X, double h, KernelType kernel,
                                 std::vector<double> grid)
    : impl_(std::make_unique<Impl>()) {
    const int n = static_cast<int>(X.rows());
    const int k = static_cast<int>(X.cols());
    if (n < 3 || k < 1) throw std::invalid_argument("local linear fit: empty design");
    if (!(h > 0.0)) throw std::invalid_argument("local linear fit: bandwidth must be positive");
    if (static_cast<double>(n) * h <= 2.0 * (2.0 * k))
        throw std::invalid_argument("local linear fit: nh too small for " +
                                    std::to_string(k) + " coefficients");

    impl_->X = X;
    impl_->h = h;
    impl_->kernel = kernel;
    if (grid.empty()) {
        impl_->sample_grid = true;
        impl_->grid.resize(n);
        for (int t = 0; t < n; ++t) impl_->grid[t] = impl_->u(t);
    } else {
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i - 1] < grid[i]))
                throw std::invalid_argument("local linear fit: grid must be increasing");
        for (double g : grid)
            if (!(g > 0.0 && g <= 1.0))
                throw std::invalid_argument("local linear fit: grid points must lie in (0,1]");
        impl_->grid = std::move(grid);
    }

    const int q = 2 * k;
    impl_->taus.resize(impl_->grid.size());
    Eigen::MatrixXd A(q, q), zw;
    for (std::size_t g = 0; g < impl_->grid.size(); ++g) {
        const double tau = impl_->grid[g];
        auto& plan = impl_->taus[g];
        plan.lo = impl_->window_lo(tau);
        plan.hi = impl_->window_hi(tau);
        plan.boundary = tau < h || tau > 1.0 - h;
        zw.resize(q, plan.hi - plan.lo);
        if (!impl_->accumulate(tau, -1, -1, A, &zw))
            throw singular_design_error("local linear fit: singular design at tau = " +
                                        std::to_string(tau));
        plan.solver = A.ldlt().solve(zw);
    }
}

LocalLinearPlan::~LocalLinearPlan() = default;
LocalLinearPlan::LocalLinearPlan(LocalLinearPlan&&) noexcept = default;
LocalLinearPlan& LocalLinearPlan::operator=(LocalLinearPlan&&) noexcept = default;

const std::vector<double>& LocalLinearPlan::grid() const { return impl_->grid; }
double LocalLinearPlan::bandwidth() const { return impl_->h; }
int LocalLinearPlan::n_obs() const { return static_cast<int>(impl_->X.rows()); }
int LocalLinearPlan::n_coef() const { return static_cast<int>(impl_->X.cols()); }

CoefficientCurves LocalLinearPlan::fit(const Eigen::VectorXd& y) const {
    if (y.size() != impl_->X.rows())
        throw std::invalid_argument("local linear fit: y length mismatch");
    const int k = n_coef();
    CoefficientCurves curves;
    curves.grid = impl_->grid;
    curves.bandwidth = impl_->h;
    curves.kernel = impl_->kernel;
    curves.estimates.resize(static_cast<Eigen::Index>(impl_->grid.size()), k);
    curves.derivatives.resize(static_cast<Eigen::Index>(impl_->grid.size()), k);
    curves.boundary.resize(impl_->grid.size());
    for (std::size_t g = 0; g < impl_->grid.size(); ++g) {
        const auto& plan = impl_->taus[g];
        const Eigen::VectorXd theta =
            plan.solver * y.segment(plan.lo, plan.hi - plan.lo);
        curves.estimates.row(g) = theta.head(k);
        curves.derivatives.row(g) = theta.tail(k);
        curves.boundary[g] = plan.boundary ? 1 : 0;
    }
    return curves;
}

Eigen::VectorXd LocalLinearPlan::fitted_values(const Eigen::VectorXd& y) const {
    if (!impl_->sample_grid)
        throw std::invalid_argument("fitted_values requires the sample-point grid");
    const CoefficientCurves curves = fit(y);
    const int n = n_obs();
    Eigen::VectorXd out(n);
    for (int t = 0; t < n; ++t) out[t] = impl_->X.row(t).dot(curves.estimates.row(t));
    return out;
}

double LocalLinearPlan::hat_diag(int t) const {
    if (!impl_->sample_grid)
        throw std::invalid_argument("hat_diag requires the sample-point grid");
    const auto& plan = impl_->taus[t];
    const int k = n_coef();
    // Row t's own column inside its local solver, projected onto x_t.
    const Eigen::VectorXd influence = plan.solver.col(t - plan.lo).head(k);
    return impl_->X.row(t).dot(influence);
}

double LocalLinearPlan::leave_out_prediction(const Eigen::VectorXd& y, int t,
                                             int l) const {
    if (!impl_->sample_grid)
        throw std::invalid_argument("leave_out_prediction requires the sample-point grid");
    if (l < 0) throw std::invalid_argument("leave_out_prediction: negative l");
    const int k = n_coef();
    const int q = 2 * k;
    const double tau = impl_->grid[t];
    Eigen::MatrixXd A(q, q);
    if (!impl_->accumulate(tau, t - l, t + l, A, nullptr))
        return std::numeric_limits<double>::quiet_NaN();

    const auto& plan = impl_->taus[t];
    Eigen::VectorXd b = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd z(q);
    for (int s = plan.lo; s < plan.hi; ++s) {
        if (s >= t - l && s <= t + l) continue;
        const double w = kernel_eval(impl_->kernel, (impl_->u(s) - tau) / impl_->h);
        if (w <= 0.0) continue;
        z.head(k) = impl_->X.row(s);
        z.tail(k) = impl_->X.row(s) * (impl_->u(s) - tau);
        b.noalias() += w * z * y[s];
    }
    const Eigen::VectorXd theta = A.ldlt().solve(b);
    return impl_->X.row(t).dot(theta.head(k));
}

CoefficientCurves local_linear_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                   double h, KernelType kernel,
                                   std::vector<double> grid) {
    return LocalLinearPlan(X, h, kernel, std::move(grid)).fit(y);
}

BandSet awb_bands(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double h,
                  const AwbConfig& config, double level, KernelType kernel,
                  int threads) {
    if (config.B < 199)
        throw std::invalid_argument("awb_bands: need at least 199 replications");
    if (!(level > 0.0 && level < 100.0))
        throw std::invalid_argument("awb_bands: level must lie in (0,100)");
    const int n = static_cast<int>(y.size());
    const int k = static_cast<int>(X.cols());
    const double gamma = config.gamma > 0.0 ? config.gamma : awb_default_gamma(n);
    if (!(gamma < 1.0)) throw std::invalid_argument("awb_bands: gamma must lie in (0,1)");
    const double h_tilde = std::min(oversmooth_bandwidth(h), 0.999);

    const LocalLinearPlan plan_h(X, h, kernel);
    const LocalLinearPlan plan_tilde(X, h_tilde, kernel);

    const CoefficientCurves curves_hat = plan_h.fit(y);
    const CoefficientCurves curves_tilde = plan_tilde.fit(y);
    Eigen::VectorXd fitted_tilde(n);
    for (int t = 0; t < n; ++t)
        fitted_tilde[t] = X.row(t).dot(curves_tilde.estimates.row(t));
    const Eigen::VectorXd z_hat = y - fitted_tilde;

    // Centered bootstrap draws per (tau, coefficient).
    const int B = config.B;
    std::vector<Eigen::MatrixXd> draws(B);
    parallel_for(
        static_cast<std::size_t>(B),
        [&](std::size_t b) {
            Rng rng(derive_seed(config.seed, b));
            Eigen::VectorXd y_star(n);
            double xi = rng.normal();
            const double nu_sd = std::sqrt(1.0 - gamma * gamma);
            for (int t = 0; t < n; ++t) {
                if (t > 0) xi = gamma * xi + nu_sd * rng.normal();
                y_star[t] = fitted_tilde[t] + xi * z_hat[t];
            }
            const CoefficientCurves c = plan_h.fit(y_star);
            draws[b] = c.estimates - curves_tilde.estimates;
        },
        threads);

    const double alpha = 1.0 - level / 100.0;
    BandSet bands;
    bands.grid = plan_h.grid();
    bands.level = level;
    bands.B = B;
    bands.gamma = gamma;
    bands.h_tilde = h_tilde;
    bands.lower.resize(n, k);
    bands.upper.resize(n, k);
    std::vector<double> column(B);
    for (int g = 0; g < n; ++g) {
        for (int j = 0; j < k; ++j) {
            for (int b = 0; b < B; ++b) column[b] = draws[b](g, j);
            std::sort(column.begin(), column.end());
            const double q_lo = quantile_lower_sorted(column, alpha / 2.0);
            const double q_hi = quantile_lower_sorted(column, 1.0 - alpha / 2.0);
            bands.lower(g, j) = curves_hat.estimates(g, j) - q_hi;
            bands.upper(g, j) = curves_hat.estimates(g, j) - q_lo;
        }
    }
    return bands;
}

BandwidthSelection select_bandwidth(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                    BandwidthMethod method, std::span<const double> h_grid,
                                    int leave_out, KernelType kernel) {
    if (h_grid.empty()) throw std::invalid_argument("select_bandwidth: empty grid");
    for (double h : h_grid)
        if (!(h > 0.0 && h <= 0.5))
            throw std::invalid_argument("select_bandwidth: grid must lie in (0, 0.5]");
    const int n = static_cast<int>(y.size());
    const int l = method == BandwidthMethod::cv ? 0
                  : method == BandwidthMethod::mcv ? leave_out
                                                   : 0;

    BandwidthSelection out;
    out.grid.assign(h_grid.begin(), h_grid.end());
    std::sort(out.grid.begin(), out.grid.end());
    out.criterion.resize(out.grid.size());

    double best = std::numeric_limits<double>::infinity();
    bool any_valid = false;
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double h = out.grid[i];
        double crit = std::numeric_limits<double>::quiet_NaN();
        try {
            const LocalLinearPlan plan(X, h, kernel);
            switch (method) {
                case BandwidthMethod::cv:
                case BandwidthMethod::mcv: {
                    double sum = 0.0;
                    bool ok = true;
                    for (int t = 0; t < n; ++t) {
                        const double pred = plan.leave_out_prediction(y, t, l);
                        if (!std::isfinite(pred)) {
                            ok = false;
                            break;
                        }
                        sum += (y[t] - pred) * (y[t] - pred);
                    }
                    if (ok) crit = sum / n;
                    break;
                }
                case BandwidthMethod::gcv:
                case BandwidthMethod::aic: {
                    const Eigen::VectorXd fitted = plan.fitted_values(y);
                    const double rss = (y - fitted).squaredNorm();
                    double tr = 0.0;
                    for (int t = 0; t < n; ++t) tr += plan.hat_diag(t);
                    if (method == BandwidthMethod::gcv) {
                        const double denom = 1.0 - tr / n;
                        if (denom > 0.0) crit = rss / (denom * denom);
                    } else {
                        // Hurvich-Simonoff-Tsai corrected AIC with trace(H)
                        // as the effective parameter count.
                        if (n - tr - 2.0 > 0.0)
                            crit = std::log(rss / n) + 2.0 * (tr + 1.0) / (n - tr - 2.0);
                    }
                    break;
                }
            }
        } catch (const std::exception&) {
            // leave crit as NaN: this h is infeasible
        }
        out.criterion[i] = crit;
        if (std::isnan(crit)) continue;
        if (crit <= best) {  // ties break toward larger h (grid is ascending)
            best = crit;
            out.h = out.grid[i];
            any_valid = true;
        }
    }
    if (!any_valid)
        throw std::domain_error("select_bandwidth: no grid bandwidth admits a valid fit");
    return out;
}

std::vector<std::vector<GridInterval>> significance_periods(const BandSet& bands) {
    const int n = static_cast<int>(bands.grid.size());
    const int k = static_cast<int>(bands.lower.cols());
    std::vector<std::vector<GridInterval>> out(k);
    for (int j = 0; j < k; ++j) {
        int run_start = -1;
        for (int g = 0; g <= n; ++g) {
            const bool sig =
                g < n && (bands.lower(g, j) > 0.0 || bands.upper(g, j) < 0.0);
            if (sig && run_start < 0) run_start = g;
            if (!sig && run_start >= 0) {
                out[j].push_back({run_start, g - 1});
                run_start = -1;
            }
        }
    }
    return out;
}

}  // namespace bubble
