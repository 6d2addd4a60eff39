#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "gqdisc/quadrature.hpp"

namespace gqd {

struct GaussianFit {
    double mean;
    double stddev;  // maximum likelihood, divisor I
};

GaussianFit fit_gaussian_mle(std::span<const double> data);

/// Gauss-Hermite rule scaled to the maximum-likelihood normal fit.
DiscreteDistribution gauss_hermite_discretize(std::span<const double> data, int num_nodes);

/// Gaussian-kernel density estimate over a copy of the sample.
class KernelDensity {
public:
    KernelDensity(std::span<const double> data, double bandwidth);

    /// h = 1.06 * std * I^(-1/5)
    static KernelDensity silverman(std::span<const double> data);

    [[nodiscard]] double bandwidth() const noexcept { return h_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

private:
    std::vector<double> data_;
    double h_;
};

double silverman_bandwidth(std::span<const double> data);

double kde_pdf(const KernelDensity& kd, double x);

/// N even-spaced points centred on the sample mean spanning
/// sqrt(2(N-1)) sample standard deviations on each side.
std::vector<double> maxent_grid(std::span<const double> data, int num_nodes);

/// Dual objective F(l) = sum_n q_n exp(l'(T(x_n) - t)) with
/// T(x) = (x, x^2, ..., x^L), L = targets.size().
struct MaxEntDual {
    double value = 0.0;
    std::vector<double> gradient;
    std::vector<std::vector<double>> hessian;
};

MaxEntDual maxent_dual(std::span<const double> grid, std::span<const double> prior,
                       std::span<const double> targets, std::span<const double> lambda);

struct MaxEntSolution {
    std::vector<double> grid;
    std::vector<double> prior;
    std::vector<double> lambda;
    std::vector<double> weights;
    int iterations = 0;
    double gradient_norm = 0.0;
};

inline constexpr int kMaxEntIterationCap = 200;
inline constexpr double kMaxEntGradientTolerance = 1e-10;

/// Damped Newton on log F starting from l = 0; converged when the moment
/// mismatch (the gradient of log F) is below kMaxEntGradientTolerance.
/// Throws Infeasible when the iterates diverge or the tilted weights collapse
/// (targets outside the reachable moment set) and Numerical when the
/// iteration cap is hit without divergence.
MaxEntSolution maxent_solve(std::span<const double> grid, std::span<const double> prior,
                            std::span<const double> targets);

struct MaxEntFit {
    DiscreteDistribution distribution;  // data units
    MaxEntSolution solution;            // standardized units
    int matched_moments;
    bool downgraded;  // four moments were requested but only two were attainable
};

/// Matches four sample moments when N >= 5 and two otherwise, on the
/// maxent_grid with a KDE prior.
MaxEntFit maxent_fit(std::span<const double> data, int num_nodes);

DiscreteDistribution maxent_discretize(std::span<const double> data, int num_nodes);

}  // namespace gqd

namespace gqd {

enum class Method { NpGq, GaussHermite, NpMe };

/// "np-gq", "gauss-hermite", "np-me"
const char* method_name(Method m) noexcept;
/// Table heading: "NP-GQ", "Gauss-Hermite", "NP-ME"
const char* method_label(Method m) noexcept;
Method parse_method(std::string_view name);

DiscreteDistribution discretize(Method method, std::span<const double> data, int num_nodes,
                                int max_nodes = kDefaultMaxNodes);

}  // namespace gqd
