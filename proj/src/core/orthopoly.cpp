#include "gqdisc/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gqdisc/error.hpp"

namespace gqd::orthopoly {

namespace {

std::vector<double> times_x(const std::vector<double>& c) {
    std::vector<double> out(c.size() + 1, 0.0);
    std::copy(c.begin(), c.end(), out.begin() + 1);
    return out;
}

double bisect(const MonicPolynomial& p, double lo, double hi) {
    double flo = poly_eval(p, lo);
    const double fhi = poly_eval(p, hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw Error(ErrorCode::Numerical, "no sign change on root bracket [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "]");
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = poly_eval(p, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

MonicPolynomial::MonicPolynomial() : c_{1.0} {}

MonicPolynomial::MonicPolynomial(std::vector<double> lower) : c_(std::move(lower)) { c_.push_back(1.0); }

double MomentFunctional::inner(const std::vector<double>& f, const std::vector<double>& g) const {
    const int deg = static_cast<int>(f.size() + g.size()) - 2;
    if (deg > m_.max_order()) {
        throw Error(ErrorCode::Input, "inner product needs moment of order " + std::to_string(deg));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0) continue;
        for (std::size_t j = 0; j < g.size(); ++j) s += f[i] * g[j] * m_[static_cast<int>(i + j)];
    }
    return s;
}

RecurrenceResult ttrr_build(const MomentFunctional& mf, int num_nodes) {
    if (num_nodes < 1) throw Error(ErrorCode::Input, "number of nodes must be at least 1");
    if (mf.moments().max_order() < 2 * num_nodes) {
        throw Error(ErrorCode::Input, "need moments up to order " + std::to_string(2 * num_nodes));
    }
    const auto n_max = static_cast<std::size_t>(num_nodes);
    const MomentSequence& m = mf.moments();

    RecurrenceResult out;
    std::vector<std::vector<double>> p;  // full coefficient vectors, leading 1
    std::vector<double> norm2;
    p.push_back({1.0});

    auto check_norm = [&](std::size_t n) {
        const double nn = mf.inner(p[n], p[n]);
        if (!(nn > kDegenerateNormTolerance * std::abs(m[static_cast<int>(2 * n)]))) {
            throw Error(ErrorCode::Degenerate,
                        "measure has too few support points: ||p_" + std::to_string(n) + "||^2 vanishes");
        }
        norm2.push_back(nn);
    };
    check_norm(0);

    for (std::size_t n = 0; n < n_max; ++n) {
        const std::vector<double> xp = times_x(p[n]);
        const double alpha = mf.inner(xp, p[n]) / norm2[n];
        out.jacobi.alphas.push_back(alpha);
        std::vector<double> next = xp;
        for (std::size_t i = 0; i < p[n].size(); ++i) next[i] -= alpha * p[n][i];
        if (n > 0) {
            const double beta2 = norm2[n] / norm2[n - 1];
            out.jacobi.betas.push_back(std::sqrt(beta2));
            for (std::size_t i = 0; i < p[n - 1].size(); ++i) next[i] -= beta2 * p[n - 1][i];
        }
        next.back() = 1.0;
        p.push_back(std::move(next));
        check_norm(n + 1);
    }

    for (auto& c : p) {
        c.pop_back();
        out.polys.emplace_back(std::move(c));
    }
    return out;
}

double poly_eval(const MonicPolynomial& p, double x) {
    const auto& c = p.coefficients();
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

double root_bound(const MonicPolynomial& p) {
    double b = 0.0;
    for (int i = 0; i < p.degree(); ++i) b = std::max(b, std::abs(p[i]));
    return 1.0 + b;
}

std::vector<double> poly_roots_bracketed(const MonicPolynomial& p, double lo, double hi) {
    if (!(lo < hi)) throw Error(ErrorCode::Input, "root interval must satisfy lo < hi");
    const int n = p.degree();
    if (n == 0) return {};
    if (n == 1) {
        const double r = -p[0];
        if (r < lo || r > hi) throw Error(ErrorCode::Numerical, "root lies outside the interval");
        return {r};
    }
    // p'/n is monic of degree n - 1.
    std::vector<double> dlower(static_cast<std::size_t>(n - 1));
    for (int i = 1; i < n; ++i) {
        dlower[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) * p[i] / static_cast<double>(n);
    }
    const std::vector<double> crit = poly_roots_bracketed(MonicPolynomial(std::move(dlower)), lo, hi);

    std::vector<double> edges;
    edges.reserve(crit.size() + 2);
    edges.push_back(lo);
    edges.insert(edges.end(), crit.begin(), crit.end());
    edges.push_back(hi);

    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) roots.push_back(bisect(p, edges[i], edges[i + 1]));
    return roots;
}

}  // namespace gqd::orthopoly
