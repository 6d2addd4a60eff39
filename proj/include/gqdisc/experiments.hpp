#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gqdisc/baselines.hpp"
#include "gqdisc/moments.hpp"

namespace gqd {

/// Deterministic uniform/normal stream. Each (seed, key...) tuple selects an
/// independent substream, so results do not depend on evaluation order.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> key);

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal by inverse CDF.
    double normal();

private:
    std::mt19937_64 engine_;
};

std::vector<double> sample_mixture(const GaussianMixture& mix, int count, RandomStream& rng);

struct ExperimentConfig {
    GaussianMixture mixture = reference_mixture();
    double risk_free = 1.0045;
    std::vector<int> sample_sizes{100, 1000, 10000};
    std::vector<int> node_counts{3, 5, 7, 9};
    std::vector<double> gammas{2.0, 4.0, 6.0};
    std::vector<Method> methods{Method::NpGq, Method::GaussHermite, Method::NpMe};
    int replications = 1000;
    std::uint64_t seed = 20190815;
    int jobs = 1;  // 0: one per hardware thread
};

/// Flat `key = value` text, '#' comments. Keys: mixture.p, mixture.mu,
/// mixture.sigma, risk_free, T, N, gamma, methods, replications, seed, jobs.
/// Lists are comma separated. Throws Config on unknown keys or bad values.
ExperimentConfig parse_config(std::string_view text);
void validate(const ExperimentConfig& cfg);

struct CellResult {
    Method method;
    int sample_size;
    int nodes;
    double gamma;
    double bias = 0.0;
    double mae = 0.0;
    double bias_se = 0.0;  // Monte Carlo standard errors
    double mae_se = 0.0;
    int replications = 0;  // successful ones
    int failures = 0;
    int downgraded = 0;  // NP-ME runs that matched two moments instead of four
};

struct ExperimentReport {
    std::vector<double> gammas;
    std::vector<double> theta_star;  // one per gamma
    std::vector<CellResult> cells;

    [[nodiscard]] const CellResult* find(Method m, int sample_size, int nodes, double gamma) const;
};

/// Throws Config when the reference portfolio cannot be solved.
CellResult run_cell(const ExperimentConfig& cfg, Method method, int sample_size, int nodes, double gamma);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// method,T,N,gamma,bias,mae,failures
std::string report_csv(const ExperimentReport& r);
/// Bias and MAE tables, methods side by side.
std::string report_tables(const ExperimentReport& r);

}  // namespace gqd
