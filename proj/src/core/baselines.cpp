#include "gqdisc/baselines.hpp"

#include <limits>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gqdisc/error.hpp"

namespace gqd {

namespace {

constexpr double kDivergedLambdaNorm = 1e6;
constexpr double kDivergedDualValue = 1e-12;

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> sufficient_stats(double x, std::size_t order) {
    std::vector<double> t(order);
    double p = x;
    for (auto& v : t) {
        v = p;
        p *= x;
    }
    return t;
}

void require_dual_shapes(std::span<const double> grid, std::span<const double> prior,
                         std::span<const double> targets, std::span<const double> lambda) {
    if (grid.empty() || grid.size() != prior.size()) {
        throw Error(ErrorCode::Input, "grid and prior must be nonempty and of equal length");
    }
    if (targets.empty() || lambda.size() != targets.size()) {
        throw Error(ErrorCode::Input, "lambda and targets must be nonempty and of equal length");
    }
}

}  // namespace

GaussianFit fit_gaussian_mle(std::span<const double> data) {
    const Standardized st = standardize(data);  // rejects data without spread
    return {st.transform.shift, st.transform.scale};
}

DiscreteDistribution gauss_hermite_discretize(std::span<const double> data, int num_nodes) {
    if (num_nodes < 1) throw Error(ErrorCode::Input, "number of nodes must be at least 1");
    const GaussianFit fit = fit_gaussian_mle(data);
    if (num_nodes == 1) return DiscreteDistribution({fit.mean}, {1.0});
    const DiscreteDistribution standard = golub_welsch(gaussian_moments(0.0, 1.0, 2 * num_nodes), num_nodes);
    return standard.mapped({fit.mean, fit.stddev});
}

KernelDensity::KernelDensity(std::span<const double> data, double bandwidth)
    : data_(data.begin(), data.end()), h_(bandwidth) {
    if (data_.empty()) throw Error(ErrorCode::Input, "empty data");
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw Error(ErrorCode::Input, "bandwidth must be positive");
}

KernelDensity KernelDensity::silverman(std::span<const double> data) {
    return KernelDensity(data, silverman_bandwidth(data));
}

double silverman_bandwidth(std::span<const double> data) {
    const GaussianFit fit = fit_gaussian_mle(data);
    return 1.06 * fit.stddev * std::pow(static_cast<double>(data.size()), -0.2);
}

double kde_pdf(const KernelDensity& kd, double x) {
    const double h = kd.bandwidth();
    CompensatedSum s;
    for (double xi : kd.data()) {
        const double u = (x - xi) / h;
        s.add(std::exp(-0.5 * u * u));
    }
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    return inv_sqrt_2pi * s.value() / (static_cast<double>(kd.data().size()) * h);
}

std::vector<double> maxent_grid(std::span<const double> data, int num_nodes) {
    if (num_nodes < 2) throw Error(ErrorCode::Input, "maximum entropy grid needs at least 2 points");
    const GaussianFit fit = fit_gaussian_mle(data);
    const double half = std::sqrt(2.0 * (num_nodes - 1)) * fit.stddev;
    std::vector<double> grid(static_cast<std::size_t>(num_nodes));
    for (int n = 0; n < num_nodes; ++n) {
        grid[static_cast<std::size_t>(n)] = fit.mean - half + 2.0 * half * n / (num_nodes - 1);
    }
    return grid;
}

MaxEntDual maxent_dual(std::span<const double> grid, std::span<const double> prior,
                       std::span<const double> targets, std::span<const double> lambda) {
    require_dual_shapes(grid, prior, targets, lambda);
    const std::size_t L = targets.size();
    MaxEntDual out;
    out.gradient.assign(L, 0.0);
    out.hessian.assign(L, std::vector<double>(L, 0.0));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        std::vector<double> t = sufficient_stats(grid[n], L);
        double expo = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            t[l] -= targets[l];
            expo += lambda[l] * t[l];
        }
        const double f = prior[n] * std::exp(expo);
        out.value += f;
        for (std::size_t a = 0; a < L; ++a) {
            out.gradient[a] += f * t[a];
            for (std::size_t b = 0; b < L; ++b) out.hessian[a][b] += f * t[a] * t[b];
        }
    }
    return out;
}

namespace {

// Tilted distribution at lambda, computed in the log domain.
struct Tilt {
    double log_value = 0.0;  // log F(lambda)
    std::vector<double> weights;
    Eigen::VectorXd gradient;  // grad log F: tilted moments minus targets
    Eigen::MatrixXd hessian;   // tilted covariance of T
};

Tilt tilt(std::span<const double> grid, std::span<const double> prior, std::span<const double> targets,
          const std::vector<double>& lambda) {
    const std::size_t L = targets.size();
    const auto dim = static_cast<Eigen::Index>(L);
    std::vector<Eigen::VectorXd> centred(grid.size(), Eigen::VectorXd(dim));
    std::vector<double> expo(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const std::vector<double> t = sufficient_stats(grid[n], L);
        expo[n] = std::log(prior[n]);
        for (std::size_t l = 0; l < L; ++l) {
            centred[n](static_cast<Eigen::Index>(l)) = t[l] - targets[l];
            expo[n] += lambda[l] * (t[l] - targets[l]);
        }
    }
    const double top = *std::max_element(expo.begin(), expo.end());
    Tilt out;
    out.weights.resize(grid.size());
    double total = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out.weights[n] = std::exp(expo[n] - top);
        total += out.weights[n];
    }
    out.log_value = top + std::log(total);
    out.gradient = Eigen::VectorXd::Zero(dim);
    out.hessian = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out.weights[n] /= total;
        out.gradient += out.weights[n] * centred[n];
        out.hessian += out.weights[n] * centred[n] * centred[n].transpose();
    }
    out.hessian -= out.gradient * out.gradient.transpose();
    return out;
}

}  // namespace

MaxEntSolution maxent_solve(std::span<const double> grid, std::span<const double> prior,
                            std::span<const double> targets) {
    const std::size_t L = targets.size();
    MaxEntSolution sol;
    sol.grid.assign(grid.begin(), grid.end());
    sol.prior.assign(prior.begin(), prior.end());
    sol.lambda.assign(L, 0.0);
    require_dual_shapes(grid, prior, targets, sol.lambda);
    double prior_total = 0.0;
    for (double q : prior) {
        if (!(q > 0.0)) throw Error(ErrorCode::Input, "prior weights must be positive");
        prior_total += q;
    }

    // Newton on log F, which shares its minimiser with F and is far better
    // conditioned away from the optimum.
    Tilt cur = tilt(grid, prior, targets, sol.lambda);
    const double log_floor = std::log(prior_total) + std::log(kDivergedDualValue);
    for (;;) {
        sol.gradient_norm = cur.gradient.norm();
        if (sol.gradient_norm <= kMaxEntGradientTolerance) break;
        if (sol.iterations >= kMaxEntIterationCap) {
            throw Error(ErrorCode::Numerical, "maximum entropy Newton iteration did not converge");
        }
        ++sol.iterations;

        const Eigen::LDLT<Eigen::MatrixXd> ldlt(cur.hessian);
        const Eigen::VectorXd step = -ldlt.solve(cur.gradient);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || !ldlt.isPositive()) {
            throw Error(ErrorCode::Infeasible, "dual Hessian became singular: moment targets unattainable on grid");
        }

        const double slope = cur.gradient.dot(step);
        double t = 1.0;
        std::vector<double> trial(L);
        Tilt next;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            for (std::size_t l = 0; l < L; ++l) trial[l] = sol.lambda[l] + t * step(static_cast<Eigen::Index>(l));
            next = tilt(grid, prior, targets, trial);
            if (!std::isfinite(next.log_value)) continue;
            const bool armijo = next.log_value <= cur.log_value + 1e-4 * t * slope;
            // Near the optimum the decrease in log F drops below rounding, so
            // progress is judged by the gradient instead.
            const bool flat = -t * slope < 1e-12 * std::max(1.0, std::abs(cur.log_value)) &&
                              next.gradient.norm() < (1.0 - 1e-4 * t) * sol.gradient_norm;
            if ((armijo && next.log_value < cur.log_value) || flat) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No further decrease is representable; accept if the moments match.
            if (sol.gradient_norm <= 1e3 * kMaxEntGradientTolerance) break;
            throw Error(ErrorCode::Numerical, "maximum entropy line search failed");
        }
        sol.lambda = trial;
        cur = std::move(next);
        if (norm(sol.lambda) > kDivergedLambdaNorm || cur.log_value < log_floor) {
            throw Error(ErrorCode::Infeasible, "dual diverges: moment targets unattainable on grid");
        }
    }

    for (double w : cur.weights) {
        if (!(w >= std::numeric_limits<double>::min())) {
            throw Error(ErrorCode::Infeasible, "tilted weights underflow: moment targets on the edge of the grid's reach");
        }
    }
    sol.weights = std::move(cur.weights);
    return sol;
}

MaxEntFit maxent_fit(std::span<const double> data, int num_nodes) {
    if (num_nodes < 2) throw Error(ErrorCode::Input, "maximum entropy needs at least 2 nodes");
    const Standardized st = standardize(data);
    const std::vector<double> grid = maxent_grid(st.data, num_nodes);

    const KernelDensity kd = KernelDensity::silverman(data);
    std::vector<double> prior(grid.size());
    double total = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        prior[n] = kde_pdf(kd, st.transform.apply(grid[n]));
        total += prior[n];
    }
    for (double& q : prior) q /= total;

    const MomentSequence sample = sample_moments(st.data, 4);
    auto attempt = [&](int moments) {
        const std::vector<double> targets(sample.values().begin() + 1, sample.values().begin() + 1 + moments);
        return maxent_solve(grid, prior, targets);
    };

    const int wanted = num_nodes >= 5 ? 4 : 2;
    int matched = wanted;
    MaxEntSolution sol;
    try {
        sol = attempt(wanted);
    } catch (const Error& e) {
        if (wanted == 2 || e.code() != ErrorCode::Infeasible) throw;
        matched = 2;
        sol = attempt(2);
    }
    DiscreteDistribution d = DiscreteDistribution(grid, sol.weights).mapped(st.transform);
    return {std::move(d), std::move(sol), matched, matched != wanted};
}

DiscreteDistribution maxent_discretize(std::span<const double> data, int num_nodes) {
    return maxent_fit(data, num_nodes).distribution;
}

}  // namespace gqd

namespace gqd {

const char* method_name(Method m) noexcept {
    switch (m) {
        case Method::NpGq: return "np-gq";
        case Method::GaussHermite: return "gauss-hermite";
        case Method::NpMe: return "np-me";
    }
    return "?";
}

const char* method_label(Method m) noexcept {
    switch (m) {
        case Method::NpGq: return "NP-GQ";
        case Method::GaussHermite: return "Gauss-Hermite";
        case Method::NpMe: return "NP-ME";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::NpGq, Method::GaussHermite, Method::NpMe}) {
        if (name == method_name(m) || name == method_label(m)) return m;
    }
    throw Error(ErrorCode::Input, "unknown method '" + std::string(name) + "' (expected np-gq, gauss-hermite or np-me)");
}

DiscreteDistribution discretize(Method method, std::span<const double> data, int num_nodes, int max_nodes) {
    if (num_nodes > max_nodes) {
        throw Error(ErrorCode::Input, "number of nodes " + std::to_string(num_nodes) +
                                          " exceeds the cap of " + std::to_string(max_nodes));
    }
    switch (method) {
        case Method::NpGq: return discretize_data(data, num_nodes, max_nodes);
        case Method::GaussHermite: return gauss_hermite_discretize(data, num_nodes);
        case Method::NpMe: return maxent_discretize(data, num_nodes);
    }
    throw Error(ErrorCode::Input, "unknown method");
}

}  // namespace gqd
