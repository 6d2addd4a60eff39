#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gqdisc/baselines.hpp"
#include "gqdisc/error.hpp"
#include "support.hpp"

using namespace gqd;
using doctest::Approx;

namespace {

std::vector<double> tilted_moments(const std::vector<double>& grid, std::span<const double> w, int order) {
    std::vector<double> m(static_cast<std::size_t>(order), 0.0);
    for (std::size_t n = 0; n < grid.size(); ++n)
        for (int k = 1; k <= order; ++k) m[static_cast<std::size_t>(k - 1)] += w[n] * std::pow(grid[n], k);
    return m;
}

}  // namespace

TEST_CASE("gaussian maximum likelihood fit") {
    const std::vector<double> a{-1, 1};
    CHECK(fit_gaussian_mle(a).mean == 0.0);
    CHECK(fit_gaussian_mle(a).stddev == Approx(1.0));
    const std::vector<double> b{0, 0, 0, 4};
    CHECK(fit_gaussian_mle(b).mean == Approx(1.0));
    CHECK(fit_gaussian_mle(b).stddev == Approx(std::sqrt(3.0)).epsilon(1e-14));
    const std::vector<double> c{2, 2, 2};
    try {
        (void)fit_gaussian_mle(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Degenerate);
    }
}

TEST_CASE("gauss-hermite rules") {
    const std::vector<double> unit{-1, 1};
    const auto r3 = gauss_hermite_discretize(unit, 3);
    const double s3 = std::sqrt(3.0);
    CHECK(r3.nodes()[0] == Approx(-s3).epsilon(1e-12));
    CHECK(std::abs(r3.nodes()[1]) <= 1e-12);
    CHECK(r3.nodes()[2] == Approx(s3).epsilon(1e-12));
    CHECK(r3.weights()[0] == Approx(1.0 / 6).epsilon(1e-12));
    CHECK(r3.weights()[1] == Approx(2.0 / 3).epsilon(1e-12));

    const std::vector<double> data{0.3, 1.1, 2.9, -0.4, 0.8};
    const auto fit = fit_gaussian_mle(data);
    const auto r1 = gauss_hermite_discretize(data, 1);
    CHECK(r1.nodes()[0] == Approx(fit.mean).epsilon(1e-14));
    CHECK(r1.weights()[0] == 1.0);
    const auto r2 = gauss_hermite_discretize(data, 2);
    CHECK(r2.nodes()[0] == Approx(fit.mean - fit.stddev).epsilon(1e-12));
    CHECK(r2.nodes()[1] == Approx(fit.mean + fit.stddev).epsilon(1e-12));
    CHECK(r2.weights()[0] == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gauss-hermite rules are symmetric about the fitted mean") {
    std::mt19937_64 gen(53);
    const auto data = test::draw(reference_mixture(), 1000, gen);
    const auto fit = fit_gaussian_mle(data);
    for (int n = 1; n <= 9; ++n) {
        const auto r = gauss_hermite_discretize(data, n);
        const auto size = r.size();
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t k = size - 1 - i;
            CHECK(std::abs((r.nodes()[i] - fit.mean) + (r.nodes()[k] - fit.mean)) <= 1e-10 * fit.stddev);
            CHECK(std::abs(r.weights()[i] - r.weights()[k]) <= 1e-10);
        }
        // Normal moments are matched through order 2N - 1.
        const auto got = distribution_moments(r, 2 * n - 1);
        const auto want = gaussian_moments(fit.mean, fit.stddev, 2 * n - 1);
        for (int k = 0; k <= 2 * n - 1; ++k) CHECK(test::rel_err(got[k], want[k]) <= 1e-10);
    }
}

TEST_CASE("kernel density") {
    const std::vector<double> one{0.0};
    const KernelDensity kd(one, 1.0);
    CHECK(kde_pdf(kd, 0.0) == Approx(1 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
    CHECK_THROWS_AS(KernelDensity(one, 0.0), Error);

    const std::vector<double> sym{-2, -0.5, 0.5, 2};
    const auto s = KernelDensity::silverman(sym);
    CHECK(s.bandwidth() == Approx(1.06 * fit_gaussian_mle(sym).stddev * std::pow(4.0, -0.2)).epsilon(1e-14));
    CHECK(silverman_bandwidth(sym) == s.bandwidth());
    for (double x : {0.1, 0.7, 1.9, 3.5}) CHECK(kde_pdf(s, x) == Approx(kde_pdf(s, -x)).epsilon(1e-14));

    // Far from the data the density is bounded by the nearest kernel.
    const double h = s.bandwidth();
    for (double x : {8.0, 15.0}) {
        const double nearest = x - 2.0;
        CHECK(kde_pdf(s, x) <= std::exp(-0.5 * std::pow(nearest / h, 2)) / (std::sqrt(2 * std::numbers::pi) * h));
    }
}

TEST_CASE("kernel density integrates to one") {
    std::mt19937_64 gen(59);
    const auto data = test::draw(reference_mixture(), 500, gen);
    const auto kd = KernelDensity::silverman(data);
    const double lo = *std::min_element(data.begin(), data.end()) - 12 * kd.bandwidth();
    const double hi = *std::max_element(data.begin(), data.end()) + 12 * kd.bandwidth();
    const int steps = 20000;
    const double h = (hi - lo) / steps;
    double total = 0.0;
    for (int i = 0; i <= steps; ++i) total += (i == 0 || i == steps ? 0.5 : 1.0) * h * kde_pdf(kd, lo + i * h);
    CHECK(total == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("maximum entropy grid") {
    const std::vector<double> unit{-1, 1};
    const auto g5 = maxent_grid(unit, 5);
    REQUIRE(g5.size() == 5);
    const double half = 2 * std::sqrt(2.0);
    for (int n = 0; n < 5; ++n) CHECK(g5[static_cast<std::size_t>(n)] == Approx(-half + half * n / 2).epsilon(1e-14));
    const std::vector<double> data{1.0, 2.0, 6.0};
    const auto fit = fit_gaussian_mle(data);
    const auto g2 = maxent_grid(data, 2);
    CHECK(g2[0] == Approx(fit.mean - std::sqrt(2.0) * fit.stddev));
    CHECK(g2[1] == Approx(fit.mean + std::sqrt(2.0) * fit.stddev));
    CHECK(maxent_grid(data, 3)[1] == Approx(fit.mean));
    CHECK_THROWS_AS(maxent_grid(data, 1), Error);
}

TEST_CASE("dual gradient and hessian against finite differences") {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> lam(-0.3, 0.3), qd(0.2, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 3 + rep % 7;
        const std::size_t L = rep % 2 ? 4 : 2;
        std::vector<double> grid, prior;
        const double half = std::sqrt(2.0 * (n - 1));
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            grid.push_back(-half + 2 * half * i / (n - 1));
            prior.push_back(qd(gen));
            total += prior.back();
        }
        for (double& q : prior) q /= total;
        std::vector<double> targets{0.05, 1.0, -0.2, 3.0};
        targets.resize(L);
        std::vector<double> l(L);
        for (double& v : l) v = lam(gen);

        const auto d = maxent_dual(grid, prior, targets, l);
        const double step = 1e-6;
        for (std::size_t i = 0; i < L; ++i) {
            auto up = l, dn = l;
            up[i] += step;
            dn[i] -= step;
            const auto fu = maxent_dual(grid, prior, targets, up), fd = maxent_dual(grid, prior, targets, dn);
            const double fd_grad = (fu.value - fd.value) / (2 * step);
            CHECK(std::abs(fd_grad - d.gradient[i]) <= 1e-6 * std::max(1.0, std::abs(d.gradient[i])));
            for (std::size_t j = 0; j < L; ++j) {
                const double fd_hess = (fu.gradient[j] - fd.gradient[j]) / (2 * step);
                CHECK(std::abs(fd_hess - d.hessian[i][j]) <= 1e-6 * std::max(1.0, std::abs(d.hessian[i][j])));
            }
        }
    }
}

TEST_CASE("prior that already matches the targets") {
    const std::vector<double> grid{-2, -1, 0, 1, 2};
    const std::vector<double> prior{0.1, 0.2, 0.4, 0.2, 0.1};
    const auto targets = tilted_moments(grid, prior, 2);
    const auto sol = maxent_solve(grid, prior, targets);
    CHECK(sol.iterations == 0);
    for (double l : sol.lambda) CHECK(l == 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(sol.weights[i] == Approx(prior[i]).epsilon(1e-15));
}

TEST_CASE("symmetric two-moment tilt") {
    const std::vector<double> grid = maxent_grid(std::vector<double>{-1, 1}, 5);
    const std::vector<double> prior{0.15, 0.2, 0.3, 0.2, 0.15};
    const std::vector<double> targets{0.0, 1.0};
    const auto sol = maxent_solve(grid, prior, targets);
    for (std::size_t i = 0; i < 5; ++i) CHECK(sol.weights[i] == Approx(sol.weights[4 - i]).epsilon(1e-12));
    const auto m = tilted_moments(grid, sol.weights, 2);
    CHECK(std::abs(m[0]) <= 1e-8);
    CHECK(std::abs(m[1] - 1.0) <= 1e-8);
    CHECK(sol.gradient_norm <= 1e-8);
}

TEST_CASE("symmetric data gives symmetric maximum entropy weights") {
    std::vector<double> data;
    for (double x : {0.2, 0.5, 0.9, 1.4, 2.5}) {
        data.push_back(x);
        data.push_back(-x);
    }
    for (int n : {3, 5, 7}) {
        const auto fit = maxent_fit(data, n);
        const auto& w = fit.distribution.weights();
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == Approx(w[w.size() - 1 - i]).epsilon(1e-9));
    }
}

TEST_CASE("unattainable targets are reported as infeasible") {
    const std::vector<double> grid{-1, 0, 1};
    const std::vector<double> prior{0.3, 0.4, 0.3};
    // Variance 2 is beyond anything supported on [-1, 1].
    const std::vector<double> targets{0.0, 2.0};
    try {
        (void)maxent_solve(grid, prior, targets);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Infeasible);
    }
}

TEST_CASE("maximum entropy fit matches sample moments") {
    std::mt19937_64 gen(67);
    int four = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto data = test::draw(reference_mixture(), 10000, gen);
        const auto st = standardize(data);
        const auto target = sample_moments(st.data, 4);
        for (int n : {3, 5, 9}) {
            const auto fit = maxent_fit(data, n);
            const int L = fit.matched_moments;
            CHECK(L == (n >= 5 && !fit.downgraded ? 4 : 2));
            if (n >= 5 && !fit.downgraded) ++four;
            const auto got = tilted_moments(fit.solution.grid, fit.solution.weights, L);
            for (int k = 1; k <= L; ++k) CHECK(std::abs(got[static_cast<std::size_t>(k - 1)] - target[k]) <= 1e-8);
            CHECK(fit.solution.gradient_norm <= 1e-8);
            double total = 0.0;
            for (std::size_t i = 0; i < fit.solution.weights.size(); ++i) {
                CHECK(fit.solution.weights[i] > 0.0);
                total += fit.solution.weights[i];
                CHECK(fit.distribution.nodes()[i] == Approx(st.transform.apply(fit.solution.grid[i])).epsilon(1e-14));
            }
            CHECK(total == Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(four > 0);
}

TEST_CASE("method names") {
    CHECK(parse_method("np-gq") == Method::NpGq);
    CHECK(parse_method("NP-ME") == Method::NpMe);
    CHECK(parse_method("gauss-hermite") == Method::GaussHermite);
    CHECK_THROWS_AS(parse_method("spline"), Error);
    CHECK(std::string(method_label(Method::GaussHermite)) == "Gauss-Hermite");
    const std::vector<double> data{0, 1, 2, 3};
    CHECK_THROWS_AS(discretize(Method::GaussHermite, data, 4, 3), Error);
    CHECK(discretize(Method::NpGq, data, 2, 9).size() == 2);
}
