#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gqdisc/error.hpp"
#include "gqdisc/orthopoly.hpp"
#include "gqdisc/quadrature.hpp"
#include "support.hpp"

using namespace gqd;
using namespace gqd::orthopoly;
using doctest::Approx;

namespace {

void check_poly(const MonicPolynomial& p, const std::vector<double>& coeffs, double tol = 1e-13) {
    REQUIRE(p.degree() + 1 == static_cast<int>(coeffs.size()));
    for (int i = 0; i <= p.degree(); ++i) CHECK(std::abs(p[i] - coeffs[static_cast<std::size_t>(i)]) <= tol);
}

MomentSequence standardized_mixture_moments(std::mt19937_64& gen, int order) {
    const auto mix = test::random_mixture(gen);
    return mixture_moments(mix.transformed({mix.mean(), mix.stddev()}), order);
}

}  // namespace

TEST_CASE("monic polynomial") {
    const MonicPolynomial one;
    CHECK(one.degree() == 0);
    CHECK(poly_eval(one, 7.0) == 1.0);
    const MonicPolynomial p({-1.0, 0.0});
    check_poly(p, {-1, 0, 1});
    CHECK(poly_eval(p, 0.0) == -1.0);
    const MonicPolynomial h3({0.0, -3.0, 0.0});
    CHECK(std::abs(poly_eval(h3, std::sqrt(3.0))) <= 1e-14);
}

TEST_CASE("hermite recurrence") {
    const auto r = ttrr_build(MomentFunctional(gaussian_moments(0, 1, 6)), 3);
    REQUIRE(r.polys.size() == 4);
    check_poly(r.polys[0], {1});
    check_poly(r.polys[1], {0, 1});
    check_poly(r.polys[2], {-1, 0, 1});
    check_poly(r.polys[3], {0, -3, 0, 1});
    CHECK(r.jacobi.betas[0] == Approx(1.0));
    CHECK(r.jacobi.betas[1] == Approx(std::sqrt(2.0)));
}

TEST_CASE("legendre recurrence") {
    const MomentSequence uniform({1, 0, 1.0 / 3, 0, 1.0 / 5, 0, 1.0 / 7});
    const auto r = ttrr_build(MomentFunctional(uniform), 3);
    check_poly(r.polys[2], {-1.0 / 3, 0, 1});
    check_poly(r.polys[3], {0, -3.0 / 5, 0, 1});
}

TEST_CASE("degenerate measure") {
    const double c = 0.8;
    std::vector<double> m;
    for (int k = 0; k <= 6; ++k) m.push_back(std::pow(c, k));
    try {
        (void)ttrr_build(MomentFunctional(MomentSequence(m)), 2);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Degenerate);
    }
    CHECK_THROWS_AS(ttrr_build(MomentFunctional(gaussian_moments(0, 1, 4)), 3), Error);
}

TEST_CASE("bracketed roots") {
    const auto a = poly_roots_bracketed(MonicPolynomial({-1.0, 0.0}), -2, 2);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == Approx(-1.0).epsilon(1e-14));
    CHECK(a[1] == Approx(1.0).epsilon(1e-14));

    const MonicPolynomial h3({0.0, -3.0, 0.0});
    const auto b = poly_roots_bracketed(h3, -root_bound(h3), root_bound(h3));
    REQUIRE(b.size() == 3);
    CHECK(b[0] == Approx(-std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(b[1]) <= 1e-14);
    CHECK(b[2] == Approx(std::sqrt(3.0)).epsilon(1e-14));

    const auto c = poly_roots_bracketed(MonicPolynomial({-1.0 / 3, 0.0}), -1, 1);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == Approx(-1 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(c[1] == Approx(1 / std::sqrt(3.0)).epsilon(1e-14));

    CHECK(poly_roots_bracketed(MonicPolynomial(), -1, 1).empty());
}

TEST_CASE("orthogonality through the moment functional") {
    std::mt19937_64 gen(43);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 1 + rep % 6;
        const MomentFunctional mf(standardized_mixture_moments(gen, 2 * n));
        const auto r = ttrr_build(mf, n);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j < i; ++j) {
                const auto& pi = r.polys[static_cast<std::size_t>(i)].coefficients();
                const auto& pj = r.polys[static_cast<std::size_t>(j)].coefficients();
                // Norms of p_N need m_2N, which is present; cross terms stay within order 2N - 1.
                const double ni = std::sqrt(mf.inner(pi, pi)), nj = std::sqrt(mf.inner(pj, pj));
                CHECK(std::abs(mf.inner(pi, pj)) <= 1e-8 * ni * nj);
            }
    }
}

TEST_CASE("recurrence agrees with the cholesky path") {
    std::mt19937_64 gen(47);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + rep % 7;
        const auto m = standardized_mixture_moments(gen, 2 * n);
        const auto r = ttrr_build(MomentFunctional(m), n);
        const auto j = jacobi_from_cholesky(cholesky(hankel_matrix(m, n)), n);
        for (int k = 0; k < n; ++k) CHECK(std::abs(r.jacobi.alphas[static_cast<std::size_t>(k)] - j.alphas[static_cast<std::size_t>(k)]) <= 1e-8);
        for (int k = 0; k + 1 < n; ++k) CHECK(std::abs(r.jacobi.betas[static_cast<std::size_t>(k)] - j.betas[static_cast<std::size_t>(k)]) <= 1e-8);

        const auto& pn = r.polys.back();
        const auto roots = poly_roots_bracketed(pn, -root_bound(pn), root_bound(pn));
        const auto rule = golub_welsch(m, n);
        REQUIRE(roots.size() == rule.size());
        for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(roots[i] - rule.nodes()[i]) <= 1e-8);
    }
}
