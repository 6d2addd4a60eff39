#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gqdisc/baselines.hpp"
#include "gqdisc/moments.hpp"
#include "gqdisc/quadrature.hpp"

namespace gqd {

/// One risky asset with log excess returns distributed on a discrete grid,
/// one risk-free asset, CRRA utility. Weights need not be normalized.
class PortfolioProblem {
public:
    PortfolioProblem(DiscreteDistribution log_excess, double risk_free, double gamma);

    [[nodiscard]] const DiscreteDistribution& log_excess() const noexcept { return dist_; }
    [[nodiscard]] double risk_free() const noexcept { return rf_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] std::span<const double> returns() const noexcept { return returns_; }

private:
    DiscreteDistribution dist_;
    double rf_;
    double gamma_;
    std::vector<double> returns_;
};

/// R_n = R_f * exp(x_n).
std::vector<double> state_returns(const DiscreteDistribution& log_excess, double risk_free);

/// E[u(R theta + R_f (1 - theta))] with u the CRRA utility (log at gamma = 1).
/// Throws Domain when some state leaves non-positive wealth.
double crra_objective(const PortfolioProblem& p, double theta);

/// Derivative of crra_objective in theta. Strictly decreasing on the
/// feasible interval.
double crra_marginal(const PortfolioProblem& p, double theta);

/// Open interval of theta keeping wealth positive in every state; either end
/// may be infinite.
struct FeasibleInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

FeasibleInterval feasible_interval(const PortfolioProblem& p);

struct PortfolioSolution {
    double theta = 0.0;
    bool degenerate = false;  // every state return equals R_f
};

inline constexpr double kThetaTolerance = 1e-12;

/// Root of the marginal utility found by exponential bracketing from zero and
/// bisection. Short sales and leverage are allowed.
PortfolioSolution solve_portfolio(const PortfolioProblem& p);

inline constexpr int kTheoreticalNodes = 11;

/// Optimal share when log excess returns follow the mixture, using a Gaussian
/// quadrature rule for the mixture itself. Falls back to fewer nodes when the
/// mixture has fewer support points.
PortfolioSolution theoretical_portfolio(const GaussianMixture& mix, double risk_free, double gamma,
                                        int num_nodes = kTheoreticalNodes);

/// Quadrature rule for a mixture built in standardized units.
DiscreteDistribution mixture_quadrature(const GaussianMixture& mix, int num_nodes);

/// Annual returns table: gross nominal stock return, gross risk-free rate and
/// an optional gross inflation factor per period.
struct ReturnsDataset {
    std::vector<double> stock;
    std::vector<double> risk_free;
    std::vector<double> inflation;  // empty: returns are already real
};

struct ReturnsCalibration {
    double risk_free;                 // exp of the mean real log risk-free rate
    std::vector<double> log_excess;   // log R_t - log R_f, real
};

ReturnsCalibration calibrate_returns(const ReturnsDataset& ds);

struct PortfolioComparisonRow {
    double gamma = 0.0;
    double theta_np = 0.0;
    double theta_gaussian = 0.0;
    double error = std::numeric_limits<double>::quiet_NaN();  // theta_G / theta_NP - 1
    bool degenerate = false;
    std::string failure;  // empty when solved
};

/// Nonparametric versus Gaussian (Gauss-Hermite) optimal portfolios on the
/// same data, one row per risk aversion.
std::vector<PortfolioComparisonRow> portfolio_comparison(std::span<const double> log_excess,
                                                         double risk_free, std::span<const double> gammas,
                                                         int num_nodes, Method np_method = Method::NpGq);

}  // namespace gqd
