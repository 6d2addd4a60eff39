#include "gqdisc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gqdisc/error.hpp"

namespace gqd {

DiscreteDistribution::DiscreteDistribution(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.empty() || nodes_.size() != weights_.size()) {
        throw Error(ErrorCode::Input, "nodes and weights must be nonempty and of equal length");
    }
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        if (!std::isfinite(nodes_[n]) || !std::isfinite(weights_[n])) {
            throw Error(ErrorCode::Input, "non-finite node or weight");
        }
        if (!(weights_[n] > 0.0)) throw Error(ErrorCode::Input, "weights must be strictly positive");
        if (n > 0 && !(nodes_[n] > nodes_[n - 1])) {
            throw Error(ErrorCode::Input, "nodes must be strictly increasing");
        }
    }
}

double DiscreteDistribution::mass() const noexcept {
    CompensatedSum s;
    for (double w : weights_) s.add(w);
    return s.value();
}

DiscreteDistribution DiscreteDistribution::mapped(const AffineTransform& t) const {
    std::vector<double> x(nodes_.size());
    std::transform(nodes_.begin(), nodes_.end(), x.begin(), [&](double z) { return t.apply(z); });
    return DiscreteDistribution(std::move(x), weights_);
}

SquareMatrix hankel_matrix(const MomentSequence& m, int num_nodes) {
    if (num_nodes < 0) throw Error(ErrorCode::Input, "number of nodes must be non-negative");
    if (m.max_order() < 2 * num_nodes) {
        throw Error(ErrorCode::Input, "need moments up to order " + std::to_string(2 * num_nodes) +
                                          ", have " + std::to_string(m.max_order()));
    }
    const auto size = static_cast<std::size_t>(num_nodes) + 1;
    SquareMatrix h(size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) h(i, j) = m[static_cast<int>(i + j)];
    }
    return h;
}

CholeskyFactor cholesky(const SquareMatrix& m) { return cholesky(m, m.size()); }

CholeskyFactor cholesky(const SquareMatrix& m, std::size_t required_pivots) {
    const std::size_t n = m.size();
    CholeskyFactor f{SquareMatrix(n)};
    auto& r = f.r;
    for (std::size_t i = 0; i < n; ++i) {
        double pivot = m(i, i);
        for (std::size_t k = 0; k < i; ++k) pivot -= r(k, i) * r(k, i);
        // Hankel diagonals span many orders of magnitude, so each pivot is
        // judged against its own diagonal entry.
        if (!(pivot > kPivotTolerance * std::abs(m(i, i)))) {
            if (i < required_pivots) {
                throw NotPositiveDefiniteError(
                    static_cast<int>(i) + 1,
                    "matrix is not positive definite (pivot " + std::to_string(i + 1) + ")");
            }
            // Remaining rows are not needed by the caller.
            for (std::size_t k = i; k < n; ++k) r(k, k) = 0.0;
            break;
        }
        r(i, i) = std::sqrt(pivot);
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * r(k, j);
            r(i, j) = s / r(i, i);
        }
    }
    return f;
}

JacobiMatrix jacobi_from_cholesky(const CholeskyFactor& f, int num_nodes) {
    const auto& r = f.r;
    if (num_nodes < 1 || r.size() < static_cast<std::size_t>(num_nodes) + 1) {
        throw Error(ErrorCode::Input, "Cholesky factor too small for the requested number of nodes");
    }
    const auto n = static_cast<std::size_t>(num_nodes);
    JacobiMatrix j;
    j.alphas.resize(n);
    j.betas.resize(n - 1);
    j.alphas[0] = r(0, 1) / r(0, 0);
    for (std::size_t k = 1; k < n; ++k) {
        j.alphas[k] = r(k, k + 1) / r(k, k) - r(k - 1, k) / r(k - 1, k - 1);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) j.betas[k] = r(k + 1, k + 1) / r(k, k);
    return j;
}

EigenDecomposition tridiagonal_eigen(const JacobiMatrix& jm) {
    const std::size_t n = jm.size();
    if (n == 0 || jm.betas.size() + 1 != n) throw Error(ErrorCode::Input, "malformed Jacobi matrix");

    std::vector<double> d = jm.alphas;
    std::vector<double> e(n, 0.0);
    std::copy(jm.betas.begin(), jm.betas.end(), e.begin());
    // z[k][i]: component k of eigenvector i.
    std::vector<std::vector<double>> z(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) z[i][i] = 1.0;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > kEigenIterationCap) {
                throw Error(ErrorCode::Numerical, "tridiagonal eigensolver did not converge");
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool deflated = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (std::size_t k = 0; k < n; ++k) {
                    f = z[k][i + 1];
                    z[k][i + 1] = s * z[k][i] + c * f;
                    z[k][i] = c * z[k][i] - s * f;
                }
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    EigenDecomposition out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t idx : order) {
        std::vector<double> v(n);
        double norm = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = z[k][idx];
            norm += v[k] * v[k];
        }
        norm = std::sqrt(norm);
        const auto lead = std::find_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
        const double sign = (lead != v.end() && *lead < 0.0) ? -1.0 : 1.0;
        for (double& x : v) x *= sign / norm;
        out.values.push_back(d[idx]);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

DiscreteDistribution golub_welsch(const MomentSequence& m, int num_nodes) {
    if (num_nodes < 1) throw Error(ErrorCode::Input, "number of nodes must be at least 1");
    const SquareMatrix h = hankel_matrix(m, num_nodes);
    const CholeskyFactor r = cholesky(h, static_cast<std::size_t>(num_nodes));
    const EigenDecomposition eig = tridiagonal_eigen(jacobi_from_cholesky(r, num_nodes));

    std::vector<double> weights(eig.values.size());
    for (std::size_t n = 0; n < weights.size(); ++n) {
        const double v0 = eig.vectors[n][0];
        weights[n] = m.mass() * v0 * v0;
        if (!(weights[n] > 0.0) || (n > 0 && !(eig.values[n] > eig.values[n - 1]))) {
            throw Error(ErrorCode::Numerical, "quadrature rule lost a node to rounding; reduce N");
        }
    }
    return DiscreteDistribution(eig.values, std::move(weights));
}

DiscreteDistribution discretize_data(std::span<const double> data, int num_nodes, int max_nodes) {
    if (num_nodes < 1) throw Error(ErrorCode::Input, "number of nodes must be at least 1");
    if (num_nodes > max_nodes) {
        throw Error(ErrorCode::Input, "number of nodes " + std::to_string(num_nodes) +
                                          " exceeds the cap of " + std::to_string(max_nodes));
    }
    if (num_nodes == 1) {
        return DiscreteDistribution({sample_stats(data).mean}, {1.0});
    }
    const Standardized st = standardize(data);
    const MomentSequence m = sample_moments(st.data, 2 * num_nodes);
    try {
        return golub_welsch(m, num_nodes).mapped(st.transform);
    } catch (const NotPositiveDefiniteError& e) {
        throw NotPositiveDefiniteError(
            e.pivot(), "moment matrix is not positive definite at pivot " + std::to_string(e.pivot()) +
                           ": data has too few effective support points for N = " +
                           std::to_string(num_nodes) + "; reduce N");
    }
}

MomentSequence distribution_moments(const DiscreteDistribution& d, int max_order) {
    if (max_order < 0) throw Error(ErrorCode::Input, "moment order must be non-negative");
    std::vector<CompensatedSum> sums(static_cast<std::size_t>(max_order) + 1);
    for (std::size_t n = 0; n < d.size(); ++n) {
        double p = d.weights()[n];
        for (auto& s : sums) {
            s.add(p);
            p *= d.nodes()[n];
        }
    }
    std::vector<double> m;
    m.reserve(sums.size());
    for (const auto& s : sums) m.push_back(s.value());
    return MomentSequence(std::move(m));
}

}  // namespace gqd
