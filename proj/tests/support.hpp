#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gqdisc/moments.hpp"

namespace gqd::test {

// Random two- or three-component mixtures with well separated scales; the
// generator is independent of the library's RandomStream on purpose.
inline GaussianMixture random_mixture(std::mt19937_64& gen) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> mean(-2.0, 2.0);
    std::uniform_real_distribution<double> sd(0.1, 1.5);
    std::uniform_real_distribution<double> raw(0.2, 1.0);
    const int k = count(gen);
    std::vector<double> p(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& v : p) total += (v = raw(gen));
    std::vector<GaussianComponent> comps;
    for (int j = 0; j < k; ++j) comps.push_back({p[static_cast<std::size_t>(j)] / total, mean(gen), sd(gen)});
    // Renormalise the last proportion so the sum is 1 to the last bit.
    double head = 0.0;
    for (int j = 0; j + 1 < k; ++j) head += comps[static_cast<std::size_t>(j)].proportion;
    comps.back().proportion = 1.0 - head;
    return GaussianMixture(comps);
}

inline std::vector<double> draw(const GaussianMixture& mix, int count, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double pick = u(gen);
        std::size_t j = 0;
        const auto comps = mix.components();
        while (j + 1 < comps.size() && pick >= comps[j].proportion) pick -= comps[j++].proportion;
        out.push_back(comps[j].mean + comps[j].stddev * z(gen));
    }
    return out;
}

// Direct long double power sums, a second code path for sample moments.
inline std::vector<long double> power_sums(const std::vector<double>& data, int max_order) {
    std::vector<long double> m(static_cast<std::size_t>(max_order) + 1, 0.0L);
    for (double x : data) {
        long double p = 1.0L;
        for (int k = 0; k <= max_order; ++k) {
            m[static_cast<std::size_t>(k)] += p;
            p *= x;
        }
    }
    for (auto& v : m) v /= static_cast<long double>(data.size());
    return m;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace gqd::test
