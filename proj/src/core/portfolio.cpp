#include "gqdisc/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gqdisc/error.hpp"

namespace gqd {

namespace {

constexpr double kFlatReturnTolerance = 1e-12;

bool is_flat(const PortfolioProblem& p) {
    return std::all_of(p.returns().begin(), p.returns().end(), [&](double r) {
        return std::abs(r - p.risk_free()) <= kFlatReturnTolerance * p.risk_free();
    });
}

double wealth(const PortfolioProblem& p, double r, double theta) {
    return p.risk_free() + theta * (r - p.risk_free());
}

}  // namespace

PortfolioProblem::PortfolioProblem(DiscreteDistribution log_excess, double risk_free, double gamma)
    : dist_(std::move(log_excess)), rf_(risk_free), gamma_(gamma) {
    if (!(rf_ > 0.0) || !std::isfinite(rf_)) throw Error(ErrorCode::Input, "risk-free rate must be positive");
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw Error(ErrorCode::Input, "risk aversion must be positive");
    returns_ = state_returns(dist_, rf_);
}

std::vector<double> state_returns(const DiscreteDistribution& log_excess, double risk_free) {
    if (!(risk_free > 0.0)) throw Error(ErrorCode::Input, "risk-free rate must be positive");
    std::vector<double> r;
    r.reserve(log_excess.size());
    for (double x : log_excess.nodes()) r.push_back(risk_free * std::exp(x));
    return r;
}

double crra_objective(const PortfolioProblem& p, double theta) {
    const auto w = p.log_excess().weights();
    const double g = p.gamma();
    double s = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        const double c = wealth(p, p.returns()[n], theta);
        if (!(c > 0.0)) {
            throw Error(ErrorCode::Domain, "portfolio share " + std::to_string(theta) +
                                               " leaves non-positive wealth in some state");
        }
        s += w[n] * (g == 1.0 ? std::log(c) : std::pow(c, 1.0 - g));
    }
    return g == 1.0 ? s : s / (1.0 - g);
}

double crra_marginal(const PortfolioProblem& p, double theta) {
    const auto w = p.log_excess().weights();
    double s = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        const double excess = p.returns()[n] - p.risk_free();
        const double c = wealth(p, p.returns()[n], theta);
        if (!(c > 0.0)) {
            throw Error(ErrorCode::Domain, "portfolio share " + std::to_string(theta) +
                                               " leaves non-positive wealth in some state");
        }
        s += w[n] * excess * std::pow(c, -p.gamma());
    }
    return s;
}

FeasibleInterval feasible_interval(const PortfolioProblem& p) {
    FeasibleInterval fi;
    const double rf = p.risk_free();
    for (double r : p.returns()) {
        if (r > rf) fi.lo = std::max(fi.lo, -rf / (r - rf));
        if (r < rf) fi.hi = std::min(fi.hi, rf / (rf - r));
    }
    return fi;
}

PortfolioSolution solve_portfolio(const PortfolioProblem& p) {
    if (is_flat(p)) return {0.0, true};

    const FeasibleInterval fi = feasible_interval(p);
    const double lo_edge = fi.lo + kThetaTolerance * std::max(1.0, std::abs(fi.lo));
    const double hi_edge = fi.hi - kThetaTolerance * std::max(1.0, std::abs(fi.hi));

    const double f0 = crra_marginal(p, 0.0);
    if (f0 == 0.0) return {0.0, false};

    // Expand away from zero in the uphill direction until the sign flips.
    const double dir = f0 > 0.0 ? 1.0 : -1.0;
    const double edge = dir > 0.0 ? hi_edge : lo_edge;
    if (!std::isfinite(edge)) {
        throw Error(ErrorCode::Unbounded,
                    "objective is unbounded: no state has a return on the other side of the risk-free rate");
    }
    double inner = 0.0;
    double step = 1.0;
    double outer = 0.0;
    for (;;) {
        outer = dir > 0.0 ? std::min(step, edge) : std::max(-step, edge);
        if (crra_marginal(p, outer) * dir <= 0.0) break;
        if (outer == edge) {
            throw Error(ErrorCode::Numerical, "marginal utility keeps its sign up to the feasibility boundary");
        }
        inner = outer;
        step *= 2.0;
    }

    double a = std::min(inner, outer);
    double b = std::max(inner, outer);
    double fa = crra_marginal(p, a);
    while (b - a > kThetaTolerance * std::max(1.0, std::abs(a))) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = crra_marginal(p, mid);
        if (fm == 0.0) return {mid, false};
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return {0.5 * (a + b), false};
}

DiscreteDistribution mixture_quadrature(const GaussianMixture& mix, int num_nodes) {
    const AffineTransform t{mix.mean(), mix.stddev()};
    if (!(t.scale > 0.0)) return DiscreteDistribution({t.shift}, {1.0});
    const MomentSequence m = mixture_moments(mix.transformed(t), 2 * num_nodes);
    try {
        return golub_welsch(m, num_nodes).mapped(t);
    } catch (const NotPositiveDefiniteError& e) {
        // Pivot k vanishes exactly when the law has k - 1 support points.
        return golub_welsch(m, e.pivot() - 1).mapped(t);
    }
}

PortfolioSolution theoretical_portfolio(const GaussianMixture& mix, double risk_free, double gamma,
                                        int num_nodes) {
    return solve_portfolio(PortfolioProblem(mixture_quadrature(mix, num_nodes), risk_free, gamma));
}

ReturnsCalibration calibrate_returns(const ReturnsDataset& ds) {
    const std::size_t n = ds.stock.size();
    if (n == 0) throw Error(ErrorCode::Input, "returns dataset is empty");
    if (ds.risk_free.size() != n || (!ds.inflation.empty() && ds.inflation.size() != n)) {
        throw Error(ErrorCode::Input, "returns dataset columns have different lengths");
    }
    auto check = [](double v, const char* what, std::size_t row) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::Input, std::string(what) + " must be positive (row " + std::to_string(row) + ")");
        }
    };
    std::vector<double> log_stock(n);
    CompensatedSum log_rf;
    for (std::size_t t = 0; t < n; ++t) {
        check(ds.stock[t], "stock return", t);
        check(ds.risk_free[t], "risk-free return", t);
        double deflator = 1.0;
        if (!ds.inflation.empty()) {
            check(ds.inflation[t], "inflation factor", t);
            deflator = ds.inflation[t];
        }
        log_stock[t] = std::log(ds.stock[t] / deflator);
        log_rf.add(std::log(ds.risk_free[t] / deflator));
    }
    const double mean_log_rf = log_rf.value() / static_cast<double>(n);
    ReturnsCalibration out{std::exp(mean_log_rf), {}};
    out.log_excess.reserve(n);
    for (double ls : log_stock) out.log_excess.push_back(ls - mean_log_rf);
    return out;
}

std::vector<PortfolioComparisonRow> portfolio_comparison(std::span<const double> log_excess,
                                                         double risk_free, std::span<const double> gammas,
                                                         int num_nodes, Method np_method) {
    std::vector<PortfolioComparisonRow> rows;
    rows.reserve(gammas.size());

    auto build = [&](Method m) {
        try {
            return discretize(m, log_excess, num_nodes);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Degenerate) throw;
            return DiscreteDistribution({sample_stats(log_excess).mean}, {1.0});
        }
    };
    const DiscreteDistribution np = build(np_method);
    const DiscreteDistribution gauss = build(Method::GaussHermite);

    for (double g : gammas) {
        PortfolioComparisonRow row;
        row.gamma = g;
        try {
            const PortfolioSolution a = solve_portfolio(PortfolioProblem(np, risk_free, g));
            const PortfolioSolution b = solve_portfolio(PortfolioProblem(gauss, risk_free, g));
            row.theta_np = a.theta;
            row.theta_gaussian = b.theta;
            row.degenerate = a.degenerate || b.degenerate;
            if (!row.degenerate) row.error = b.theta / a.theta - 1.0;
        } catch (const Error& e) {
            row.failure = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace gqd
