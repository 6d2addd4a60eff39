#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gqdisc/error.hpp"
#include "gqdisc/experiments.hpp"
#include "gqdisc/portfolio.hpp"

using namespace gqd;
using doctest::Approx;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.sample_sizes = {100, 400};
    cfg.node_counts = {3, 5};
    cfg.gammas = {2.0, 4.0};
    cfg.replications = 12;
    return cfg;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("random streams are keyed and reproducible") {
    RandomStream a(5, {1, 2}), b(5, {1, 2}), c(5, {1, 3}), d(6, {1, 2});
    bool differs_key = false, differs_seed = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        differs_key |= x != c.uniform();
        differs_seed |= x != d.uniform();
    }
    CHECK(differs_key);
    CHECK(differs_seed);
}

TEST_CASE("normal draws have unit variance") {
    RandomStream rng(9, {0});
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) <= 3.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("mixture sampling") {
    RandomStream rng(1, {0});
    const GaussianMixture first({{1.0, 0.7, 0.0}, {0.0, -3.0, 0.0}});
    for (double x : sample_mixture(first, 50, rng)) CHECK(x == 0.7);

    const int t = 100000;
    const GaussianMixture atoms({{0.5, -1.0, 0.0}, {0.5, 1.0, 0.0}});
    double s = 0.0;
    for (double x : sample_mixture(atoms, t, rng)) s += x;
    CHECK(std::abs(s / t) <= 3.0 / std::sqrt(t));

    const int big = 1000000;
    const auto mix = reference_mixture();
    double m = 0.0;
    for (double x : sample_mixture(mix, big, rng)) m += x;
    CHECK(std::abs(m / big - mix.mean()) <= 3.0 * mix.stddev() / std::sqrt(big));
    CHECK(mix.mean() == Approx(0.0604).epsilon(2e-3));
}

TEST_CASE("two-atom truth is recovered replication by replication") {
    ExperimentConfig cfg;
    cfg.mixture = GaussianMixture({{0.3, -0.15, 0.0}, {0.7, 0.1, 0.0}});
    cfg.replications = 20;
    const int t = 200;
    for (double g : {2.0, 5.0}) {
        const double theta_star = theoretical_portfolio(cfg.mixture, cfg.risk_free, g).theta;
        const double exact =
            solve_portfolio(PortfolioProblem(DiscreteDistribution({-0.15, 0.1}, {0.3, 0.7}), cfg.risk_free, g)).theta;
        CHECK(theta_star == Approx(exact).epsilon(1e-10));

        // Oracle: replay each replication's stream and solve the two-state
        // problem at the empirical frequencies.
        double bias = 0.0, mae = 0.0;
        for (int m = 0; m < cfg.replications; ++m) {
            RandomStream rng(cfg.seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(m)});
            const auto data = sample_mixture(cfg.mixture, t, rng);
            const double low = static_cast<double>(std::count(data.begin(), data.end(), -0.15)) / t;
            const double theta =
                solve_portfolio(PortfolioProblem(DiscreteDistribution({-0.15, 0.1}, {low, 1 - low}), cfg.risk_free, g)).theta;
            bias += (theta / theta_star - 1) / cfg.replications;
            mae += std::abs(theta / theta_star - 1) / cfg.replications;
        }
        const auto c = run_cell(cfg, Method::NpGq, t, 2, g);
        CHECK(c.failures == 0);
        CHECK(c.replications == 20);
        CHECK(std::abs(c.bias - bias) <= 1e-8);
        CHECK(std::abs(c.mae - mae) <= 1e-8);
    }
}

TEST_CASE("serial and parallel runs agree bit for bit") {
    auto cfg = small_config();
    cfg.jobs = 1;
    const auto serial = run_experiment(cfg);
    cfg.jobs = 4;
    const auto parallel = run_experiment(cfg);
    CHECK(report_csv(serial) == report_csv(parallel));
    CHECK(report_tables(serial) == report_tables(parallel));
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].bias == parallel.cells[i].bias);
        CHECK(serial.cells[i].mae_se == parallel.cells[i].mae_se);
    }
    cfg.seed += 1;
    CHECK(report_csv(run_experiment(cfg)) != report_csv(serial));
}

TEST_CASE("report structure") {
    const auto cfg = small_config();
    const auto r = run_experiment(cfg);
    CHECK(r.cells.size() == 3 * 2 * 2 * 2);
    CHECK(r.theta_star.size() == 2);
    for (const auto& c : r.cells) {
        CHECK(c.mae >= std::abs(c.bias) - 1e-15);
        CHECK(c.failures + c.replications == cfg.replications);
        if (c.method != Method::NpMe) CHECK(c.downgraded == 0);
    }
    const auto* cell = r.find(Method::GaussHermite, 400, 5, 4.0);
    REQUIRE(cell != nullptr);
    const auto single = run_cell(cfg, Method::GaussHermite, 400, 5, 4.0);
    CHECK(single.bias == cell->bias);
    CHECK(single.mae == cell->mae);
    CHECK(r.find(Method::GaussHermite, 400, 7, 4.0) == nullptr);

    const std::string csv = report_csv(r);
    CHECK(csv.rfind("method,T,N,gamma,bias,mae,failures\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + r.cells.size());
    CHECK(csv.find("\nnp-me,400,5,4,") != std::string::npos);

    const std::string tables = report_tables(r);
    CHECK(tables.find("Relative bias") != std::string::npos);
    CHECK(tables.find("Relative mean absolute error") != std::string::npos);
    for (const char* label : {"NP-GQ", "Gauss-Hermite", "NP-ME"}) CHECK(tables.find(label) != std::string::npos);
}

TEST_CASE("failed replications are counted and excluded") {
    ExperimentConfig cfg;
    cfg.sample_sizes = {3};  // three draws cannot support a five-point rule
    cfg.node_counts = {5};
    cfg.gammas = {2.0};
    cfg.methods = {Method::NpGq};
    cfg.replications = 7;
    const auto c = run_experiment(cfg).cells.at(0);
    CHECK(c.failures == 7);
    CHECK(c.replications == 0);
    CHECK(std::isnan(c.bias));
}

TEST_CASE("gauss-hermite overweights the stock") {
    ExperimentConfig cfg;
    cfg.replications = 60;
    const auto c = run_cell(cfg, Method::GaussHermite, 2000, 5, 2.0);
    CHECK(c.bias > 3 * c.bias_se);
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"(# small grid
mixture.p = 0.25, 0.75
mixture.mu = -0.1, 0.05
mixture.sigma = 0.2, 0.1
risk_free = 1.01
T = 50, 500   # two sizes
N = 2,4
gamma = 1.5
methods = np-gq, NP-ME
replications = 30
seed = 12345678901234
jobs = 0
)");
    CHECK(cfg.mixture.components().size() == 2);
    CHECK(cfg.mixture.components()[1].mean == 0.05);
    CHECK(cfg.risk_free == 1.01);
    CHECK(cfg.sample_sizes == std::vector<int>{50, 500});
    CHECK(cfg.node_counts == std::vector<int>{2, 4});
    CHECK(cfg.gammas == std::vector<double>{1.5});
    CHECK(cfg.methods == std::vector<Method>{Method::NpGq, Method::NpMe});
    CHECK(cfg.replications == 30);
    CHECK(cfg.seed == 12345678901234ULL);
    CHECK(cfg.jobs == 0);

    const auto defaults = parse_config("");
    CHECK(defaults.replications == 1000);
    CHECK(defaults.node_counts == std::vector<int>{3, 5, 7, 9});

    for (const char* bad : {"colour = red", "T = 1", "N = 10", "gamma = -1", "replications = 0", "jobs = -2",
                            "T = abc", "methods = spline", "mixture.p = 1\nmixture.mu = 0, 1\nmixture.sigma = 1",
                            "mixture.p = 0.5\nmixture.mu = 0\nmixture.sigma = 1", "no equals sign"}) {
        try {
            (void)parse_config(bad);
            FAIL("expected a config error for: " << bad);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Config);
        }
    }
}
