#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gqdisc/moments.hpp"

namespace gqd {

/// Nodes in strictly increasing order with strictly positive weights.
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<double> nodes, std::vector<double> weights);

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double mass() const noexcept;

    /// Image under x -> t.apply(x); weights are unchanged.
    [[nodiscard]] DiscreteDistribution mapped(const AffineTransform& t) const;

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Dense row-major square matrix, sized for moment problems (a dozen rows).
class SquareMatrix {
public:
    explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> a_;
};

/// Upper-triangular R with M = R'R.
struct CholeskyFactor {
    SquareMatrix r;
};

/// Recurrence coefficients of monic orthogonal polynomials; the symmetric
/// tridiagonal matrix has alphas on the diagonal and betas beside it.
struct JacobiMatrix {
    std::vector<double> alphas;
    std::vector<double> betas;  // size alphas.size() - 1, all positive

    [[nodiscard]] std::size_t size() const noexcept { return alphas.size(); }
};

struct EigenDecomposition {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // unit norm, first nonzero entry positive
};

inline constexpr int kDefaultMaxNodes = 9;
inline constexpr double kPivotTolerance = 1e-12;
inline constexpr int kEigenIterationCap = 60;  // per eigenvalue

/// M_ij = m_{i+j}, 0-based, for an (N+1)-square matrix.
SquareMatrix hankel_matrix(const MomentSequence& m, int num_nodes);

/// Throws NotPositiveDefiniteError when pivot i falls below kPivotTolerance
/// times M_ii.
CholeskyFactor cholesky(const SquareMatrix& m);

/// As above, but only the first `required_pivots` pivots must be positive;
/// later non-positive pivots are clamped to zero.
CholeskyFactor cholesky(const SquareMatrix& m, std::size_t required_pivots);

JacobiMatrix jacobi_from_cholesky(const CholeskyFactor& r, int num_nodes);

/// Implicit-shift QL iteration specialised to symmetric tridiagonal input.
EigenDecomposition tridiagonal_eigen(const JacobiMatrix& j);

/// Gaussian quadrature rule with `num_nodes` nodes for the measure whose
/// moments are given. Exact for polynomials of degree <= 2 * num_nodes - 1.
DiscreteDistribution golub_welsch(const MomentSequence& m, int num_nodes);

/// Discrete distribution whose first 2N - 1 moments equal the sample
/// moments of `data`. Works in standardized units internally.
DiscreteDistribution discretize_data(std::span<const double> data, int num_nodes,
                                     int max_nodes = kDefaultMaxNodes);

/// Raw moments sum_n w_n x_n^k for k = 0..max_order.
MomentSequence distribution_moments(const DiscreteDistribution& d, int max_order);

template <class F>
double expectation(const DiscreteDistribution& d, F&& g) {
    double s = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) s += d.weights()[n] * g(d.nodes()[n]);
    return s;
}

}  // namespace gqd
