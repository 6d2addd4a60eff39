#pragma once

#include <vector>

#include "gqdisc/moments.hpp"
#include "gqdisc/quadrature.hpp"

// Orthogonal polynomials built directly from a moment functional. This path
// shares no code with the Cholesky/eigenvalue route in quadrature.hpp and is
// used to cross-check it.
namespace gqd::orthopoly {

/// c_0 + c_1 x + ... + x^n, leading coefficient exactly one.
class MonicPolynomial {
public:
    MonicPolynomial();  // p(x) = 1
    /// Lower-order coefficients c_0..c_{n-1}; the leading one is implied.
    explicit MonicPolynomial(std::vector<double> lower);

    [[nodiscard]] int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return c_; }
    [[nodiscard]] double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> c_;
};

/// (f, g) = sum_ij f_i g_j m_{i+j}, restricted to polynomials whose degrees
/// sum to at most the available moment order.
class MomentFunctional {
public:
    explicit MomentFunctional(MomentSequence m) : m_(std::move(m)) {}

    [[nodiscard]] double inner(const std::vector<double>& f, const std::vector<double>& g) const;
    [[nodiscard]] const MomentSequence& moments() const noexcept { return m_; }

private:
    MomentSequence m_;
};

struct RecurrenceResult {
    std::vector<MonicPolynomial> polys;  // p_0..p_N
    JacobiMatrix jacobi;                 // N x N
};

inline constexpr double kDegenerateNormTolerance = 1e-12;

/// Three-term recurrence p_{n+1} = (x - alpha_{n+1}) p_n - beta_n^2 p_{n-1}.
/// Throws Degenerate when some ||p_n||^2 vanishes relative to (x^n, x^n).
RecurrenceResult ttrr_build(const MomentFunctional& mf, int num_nodes);

double poly_eval(const MonicPolynomial& p, double x);

/// Real roots of a polynomial whose roots are all real and simple, ascending.
/// Brackets come from the critical points (roots of p'), which interlace the
/// roots of p; each bracket is refined by bisection. Throws Numerical if a
/// bracket does not change sign.
std::vector<double> poly_roots_bracketed(const MonicPolynomial& p, double lo, double hi);

/// Cauchy bound: every root lies in [-b, b].
double root_bound(const MonicPolynomial& p);

}  // namespace gqd::orthopoly
