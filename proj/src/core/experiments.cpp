#include "gqdisc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "gqdisc/error.hpp"
#include "gqdisc/portfolio.hpp"

namespace gqd {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::vector<std::uint32_t> words;
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto k : key) push(k);
    return std::seed_seq(words.begin(), words.end());
}

std::mt19937_64 make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::seed_seq seq = make_seed_seq(seed, key);
    return std::mt19937_64(seq);
}

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CellKey {
    Method method;
    int nodes;
    std::size_t gamma_index;
};

struct Outcome {
    double ratio = 0.0;  // theta_hat / theta_star - 1
    bool ok = false;
    bool downgraded = false;
};

// One sample size: every replication draws a dataset once and evaluates all
// requested cells on it. results[m][c] refers to cells[c].
std::vector<std::vector<Outcome>> simulate(const ExperimentConfig& cfg, int sample_size,
                                           const std::vector<CellKey>& cells,
                                           const std::vector<double>& theta_star) {
    const auto reps = static_cast<std::size_t>(cfg.replications);
    std::vector<std::vector<Outcome>> results(reps, std::vector<Outcome>(cells.size()));

    auto replicate = [&](std::size_t m) {
        RandomStream rng(cfg.seed, {static_cast<std::uint64_t>(sample_size), m});
        const std::vector<double> data = sample_mixture(cfg.mixture, sample_size, rng);
        std::optional<DiscreteDistribution> dist;
        bool downgraded = false;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const CellKey& key = cells[c];
            const bool same_rule = c > 0 && cells[c - 1].method == key.method && cells[c - 1].nodes == key.nodes;
            if (!same_rule) {
                dist.reset();
                downgraded = false;
                try {
                    if (key.method == Method::NpMe) {
                        MaxEntFit fit = maxent_fit(data, key.nodes);
                        downgraded = fit.downgraded;
                        dist.emplace(std::move(fit.distribution));
                    } else {
                        dist.emplace(discretize(key.method, data, key.nodes));
                    }
                } catch (const Error&) {
                }
            }
            if (!dist) continue;
            try {
                const double g = cfg.gammas[key.gamma_index];
                const PortfolioSolution s = solve_portfolio(PortfolioProblem(*dist, cfg.risk_free, g));
                results[m][c] = {s.theta / theta_star[key.gamma_index] - 1.0, true, downgraded};
            } catch (const Error&) {
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned jobs = cfg.jobs <= 0 ? hw : static_cast<unsigned>(cfg.jobs);
    if (jobs <= 1 || reps <= 1) {
        for (std::size_t m = 0; m < reps; ++m) replicate(m);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
        pool.emplace_back([&, j] {
            try {
                for (std::size_t m = next++; m < reps; m = next++) replicate(m);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

CellResult summarize(const CellKey& key, int sample_size, double gamma,
                     const std::vector<std::vector<Outcome>>& results, std::size_t c) {
    CellResult cell{key.method, sample_size, key.nodes, gamma};
    double sum = 0.0, sum_sq = 0.0, abs_sum = 0.0;
    for (const auto& row : results) {
        const Outcome& o = row[c];
        if (!o.ok) {
            ++cell.failures;
            continue;
        }
        ++cell.replications;
        if (o.downgraded) ++cell.downgraded;
        sum += o.ratio;
        sum_sq += o.ratio * o.ratio;
        abs_sum += std::abs(o.ratio);
    }
    const double n = cell.replications;
    if (n > 0) {
        cell.bias = sum / n;
        cell.mae = abs_sum / n;
    } else {
        cell.bias = cell.mae = std::numeric_limits<double>::quiet_NaN();
    }
    if (n > 1) {
        const double var = std::max(0.0, (sum_sq - n * cell.bias * cell.bias) / (n - 1));
        const double var_abs = std::max(0.0, (sum_sq - n * cell.mae * cell.mae) / (n - 1));
        cell.bias_se = std::sqrt(var / n);
        cell.mae_se = std::sqrt(var_abs / n);
    }
    return cell;
}

std::vector<double> reference_thetas(const ExperimentConfig& cfg) {
    std::vector<double> out;
    for (double g : cfg.gammas) {
        try {
            const PortfolioSolution s = theoretical_portfolio(cfg.mixture, cfg.risk_free, g);
            if (s.degenerate || s.theta == 0.0) {
                throw Error(ErrorCode::Config, "reference portfolio is zero; relative errors undefined");
            }
            out.push_back(s.theta);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, std::string("cannot solve the reference portfolio for gamma = ") +
                                               fmt12(g) + ": " + e.what());
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::Config, "bad number '" + s + "' for key " + key);
    }
}

long long parse_integer(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::Config, "bad integer '" + s + "' for key " + key);
    }
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> key)
    : engine_(make_engine(seed, key)) {}

double RandomStream::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, uniform());
}

std::vector<double> sample_mixture(const GaussianMixture& mix, int count, RandomStream& rng) {
    if (count < 0) throw Error(ErrorCode::Input, "sample size must be non-negative");
    const auto comps = mix.components();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform();
        std::size_t j = 0;
        double cum = comps[0].proportion;
        while (u >= cum && j + 1 < comps.size()) cum += comps[++j].proportion;
        const double z = rng.normal();
        out.push_back(comps[j].mean + comps[j].stddev * z);
    }
    return out;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::vector<double> p, mu, sigma;
    bool mixture_given = false;

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const std::vector<std::string> items = split_list(value);

        auto doubles = [&] {
            std::vector<double> v;
            for (const auto& s : items) v.push_back(parse_double(key, s));
            return v;
        };
        auto ints = [&] {
            std::vector<int> v;
            for (const auto& s : items) v.push_back(static_cast<int>(parse_integer(key, s)));
            return v;
        };

        if (key == "mixture.p") {
            p = doubles();
            mixture_given = true;
        } else if (key == "mixture.mu") {
            mu = doubles();
            mixture_given = true;
        } else if (key == "mixture.sigma") {
            sigma = doubles();
            mixture_given = true;
        } else if (key == "risk_free") {
            cfg.risk_free = parse_double(key, value);
        } else if (key == "T") {
            cfg.sample_sizes = ints();
        } else if (key == "N") {
            cfg.node_counts = ints();
        } else if (key == "gamma") {
            cfg.gammas = doubles();
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& s : items) {
                try {
                    cfg.methods.push_back(parse_method(s));
                } catch (const Error& e) {
                    throw Error(ErrorCode::Config, e.what());
                }
            }
        } else if (key == "replications") {
            cfg.replications = static_cast<int>(parse_integer(key, value));
        } else if (key == "seed") {
            try {
                cfg.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw Error(ErrorCode::Config, "bad seed '" + value + "'");
            }
        } else if (key == "jobs") {
            cfg.jobs = static_cast<int>(parse_integer(key, value));
        } else {
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }

    if (mixture_given) {
        if (p.empty() || p.size() != mu.size() || p.size() != sigma.size()) {
            throw Error(ErrorCode::Config, "mixture.p, mixture.mu and mixture.sigma must have equal lengths");
        }
        std::vector<GaussianComponent> comps;
        for (std::size_t j = 0; j < p.size(); ++j) comps.push_back({p[j], mu[j], sigma[j]});
        try {
            cfg.mixture = GaussianMixture(std::move(comps));
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, e.what());
        }
    }
    validate(cfg);
    return cfg;
}

void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::Config, msg); };
    if (cfg.replications < 1) fail("replications must be at least 1");
    if (!(cfg.risk_free > 0.0)) fail("risk_free must be positive");
    if (cfg.sample_sizes.empty() || cfg.node_counts.empty() || cfg.gammas.empty() || cfg.methods.empty()) {
        fail("T, N, gamma and methods must be nonempty");
    }
    for (int t : cfg.sample_sizes) {
        if (t < 2) fail("every sample size T must be at least 2");
    }
    for (int n : cfg.node_counts) {
        if (n < 1 || n > kDefaultMaxNodes) fail("every N must lie in [1, " + std::to_string(kDefaultMaxNodes) + "]");
    }
    for (double g : cfg.gammas) {
        if (!(g > 0.0)) fail("every gamma must be positive");
    }
    if (cfg.jobs < 0) fail("jobs must be non-negative");
}

const CellResult* ExperimentReport::find(Method m, int sample_size, int nodes, double gamma) const {
    for (const auto& c : cells) {
        if (c.method == m && c.sample_size == sample_size && c.nodes == nodes && c.gamma == gamma) return &c;
    }
    return nullptr;
}

CellResult run_cell(const ExperimentConfig& cfg, Method method, int sample_size, int nodes, double gamma) {
    ExperimentConfig one = cfg;
    one.methods = {method};
    one.sample_sizes = {sample_size};
    one.node_counts = {nodes};
    one.gammas = {gamma};
    validate(one);
    const std::vector<double> theta_star = reference_thetas(one);
    const std::vector<CellKey> cells{{method, nodes, 0}};
    return summarize(cells[0], sample_size, gamma, simulate(one, sample_size, cells, theta_star), 0);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentReport report;
    report.gammas = cfg.gammas;
    report.theta_star = reference_thetas(cfg);

    std::vector<CellKey> cells;
    for (Method m : cfg.methods) {
        for (int n : cfg.node_counts) {
            for (std::size_t g = 0; g < cfg.gammas.size(); ++g) cells.push_back({m, n, g});
        }
    }
    for (int t : cfg.sample_sizes) {
        const auto results = simulate(cfg, t, cells, report.theta_star);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            report.cells.push_back(summarize(cells[c], t, cfg.gammas[cells[c].gamma_index], results, c));
        }
    }
    return report;
}

std::string report_csv(const ExperimentReport& r) {
    std::string out = "method,T,N,gamma,bias,mae,failures\n";
    for (const auto& c : r.cells) {
        out += method_name(c.method);
        out += ',' + std::to_string(c.sample_size) + ',' + std::to_string(c.nodes) + ',' + fmt12(c.gamma) + ',' +
               fmt12(c.bias) + ',' + fmt12(c.mae) + ',' + std::to_string(c.failures) + '\n';
    }
    return out;
}

std::string report_tables(const ExperimentReport& r) {
    std::vector<Method> methods;
    std::vector<int> sizes, nodes;
    for (const auto& c : r.cells) {
        if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
        if (std::find(sizes.begin(), sizes.end(), c.sample_size) == sizes.end()) sizes.push_back(c.sample_size);
        if (std::find(nodes.begin(), nodes.end(), c.nodes) == nodes.end()) nodes.push_back(c.nodes);
    }
    const std::size_t width = 8 * r.gammas.size();
    char buf[64];

    auto table = [&](const char* title, double CellResult::*field) {
        std::string out = std::string(title) + "\n";
        out += "            ";
        for (Method m : methods) {
            std::string label = method_label(m);
            label.resize(std::max(width, label.size()) + 2, ' ');
            out += label;
        }
        out += "\n     T   N  ";
        for (std::size_t k = 0; k < methods.size(); ++k) {
            for (double g : r.gammas) {
                std::snprintf(buf, sizeof buf, "%-8s", ("g=" + fmt12(g)).c_str());
                out += buf;
            }
            out += "  ";
        }
        out += '\n';
        for (int t : sizes) {
            for (int n : nodes) {
                std::snprintf(buf, sizeof buf, "%6d %3d  ", t, n);
                out += buf;
                for (Method m : methods) {
                    for (double g : r.gammas) {
                        const CellResult* c = r.find(m, t, n, g);
                        if (c == nullptr || c->replications == 0) {
                            out += "   -    ";
                        } else {
                            std::snprintf(buf, sizeof buf, "%-8.3f", c->*field);
                            out += buf;
                        }
                    }
                    out += "  ";
                }
                out += '\n';
            }
        }
        return out;
    };

    std::string out = table("Relative bias of the optimal portfolio", &CellResult::bias);
    out += '\n';
    out += table("Relative mean absolute error of the optimal portfolio", &CellResult::mae);
    std::size_t failures = 0;
    for (const auto& c : r.cells) failures += static_cast<std::size_t>(c.failures);
    if (failures > 0) out += "\nfailed replications (excluded): " + std::to_string(failures) + "\n";
    return out;
}

}  // namespace gqd
