#include "gqdisc/gqdisc.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>

#include "gqdisc/baselines.hpp"
#include "gqdisc/error.hpp"
#include "gqdisc/experiments.hpp"
#include "gqdisc/portfolio.hpp"
#include "gqdisc/quadrature.hpp"

struct gqd_distribution {
    gqd::DiscreteDistribution value;
};

struct gqd_experiment_config {
    gqd::ExperimentConfig value;
};

struct gqd_report {
    gqd::ExperimentReport value;
    std::string csv;
    std::string tables;
};

namespace {

thread_local std::string last_error;

gqd_status to_status(gqd::ErrorCode code) {
    switch (code) {
        case gqd::ErrorCode::Input: return GQD_ERR_INPUT;
        case gqd::ErrorCode::Degenerate: return GQD_ERR_DEGENERATE;
        case gqd::ErrorCode::NotPositiveDefinite: return GQD_ERR_NOT_POSITIVE_DEFINITE;
        case gqd::ErrorCode::Numerical: return GQD_ERR_NUMERICAL;
        case gqd::ErrorCode::Infeasible: return GQD_ERR_INFEASIBLE;
        case gqd::ErrorCode::Domain: return GQD_ERR_DOMAIN;
        case gqd::ErrorCode::Unbounded: return GQD_ERR_UNBOUNDED;
        case gqd::ErrorCode::Config: return GQD_ERR_CONFIG;
    }
    return GQD_ERR_INTERNAL;
}

gqd_status fail(gqd_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <class F>
gqd_status guarded(F&& f) noexcept {
    try {
        f();
        return GQD_OK;
    } catch (const gqd::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(GQD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GQD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GQD_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw gqd::Error(gqd::ErrorCode::Input, what);
}

std::span<const double> view(const double* p, std::size_t n) {
    require(p != nullptr || n == 0, "null data pointer");
    return {p, n};
}

gqd::Method to_method(gqd_method m) {
    switch (m) {
        case GQD_METHOD_NP_GQ: return gqd::Method::NpGq;
        case GQD_METHOD_GAUSS_HERMITE: return gqd::Method::GaussHermite;
        case GQD_METHOD_NP_ME: return gqd::Method::NpMe;
    }
    throw gqd::Error(gqd::ErrorCode::Input, "unknown method");
}

gqd_method from_method(gqd::Method m) {
    switch (m) {
        case gqd::Method::NpGq: return GQD_METHOD_NP_GQ;
        case gqd::Method::GaussHermite: return GQD_METHOD_GAUSS_HERMITE;
        case gqd::Method::NpMe: return GQD_METHOD_NP_ME;
    }
    return GQD_METHOD_NP_GQ;
}

gqd_status copy_text(const std::string& s, char* buffer, std::size_t capacity, std::size_t* needed) {
    if (needed != nullptr) *needed = s.size();
    if (buffer == nullptr) return GQD_OK;
    if (capacity < s.size() + 1) return fail(GQD_ERR_BUFFER, "buffer too small");
    std::memcpy(buffer, s.c_str(), s.size() + 1);
    return GQD_OK;
}

}  // namespace

extern "C" {

const char* gqd_version(void) { return "1.0.0"; }

const char* gqd_last_error(void) { return last_error.c_str(); }

const char* gqd_status_string(gqd_status status) {
    switch (status) {
        case GQD_OK: return "ok";
        case GQD_ERR_INPUT: return "input error";
        case GQD_ERR_DEGENERATE: return "degenerate data";
        case GQD_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
        case GQD_ERR_NUMERICAL: return "numerical failure";
        case GQD_ERR_INFEASIBLE: return "infeasible";
        case GQD_ERR_DOMAIN: return "domain error";
        case GQD_ERR_UNBOUNDED: return "unbounded";
        case GQD_ERR_CONFIG: return "configuration error";
        case GQD_ERR_BUFFER: return "buffer too small";
        case GQD_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

gqd_status gqd_method_from_name(const char* name, gqd_method* out) {
    return guarded([&] {
        require(name != nullptr && out != nullptr, "null argument");
        *out = from_method(gqd::parse_method(name));
    });
}

gqd_status gqd_discretize(gqd_method method, const double* data, size_t count, int nodes, int max_nodes,
                          gqd_distribution** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = nullptr;
        const int cap = max_nodes <= 0 ? gqd::kDefaultMaxNodes : max_nodes;
        *out = new gqd_distribution{gqd::discretize(to_method(method), view(data, count), nodes, cap)};
    });
}

gqd_status gqd_golub_welsch(const double* moments, size_t count, int nodes, gqd_distribution** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = nullptr;
        const auto m = view(moments, count);
        *out = new gqd_distribution{gqd::golub_welsch(gqd::MomentSequence({m.begin(), m.end()}), nodes)};
    });
}

gqd_status gqd_distribution_create(const double* nodes, const double* weights, size_t count,
                                   gqd_distribution** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = nullptr;
        const auto x = view(nodes, count);
        const auto w = view(weights, count);
        *out = new gqd_distribution{gqd::DiscreteDistribution({x.begin(), x.end()}, {w.begin(), w.end()})};
    });
}

size_t gqd_distribution_size(const gqd_distribution* d) { return d == nullptr ? 0 : d->value.size(); }

gqd_status gqd_distribution_get(const gqd_distribution* d, double* nodes, double* weights, size_t capacity) {
    if (d != nullptr && capacity < d->value.size()) return fail(GQD_ERR_BUFFER, "capacity too small");
    return guarded([&] {
        require(d != nullptr, "null distribution");
        for (std::size_t n = 0; n < d->value.size(); ++n) {
            if (nodes != nullptr) nodes[n] = d->value.nodes()[n];
            if (weights != nullptr) weights[n] = d->value.weights()[n];
        }
    });
}

gqd_status gqd_distribution_moments(const gqd_distribution* d, int max_order, double* out) {
    return guarded([&] {
        require(d != nullptr && out != nullptr, "null argument");
        const gqd::MomentSequence m = gqd::distribution_moments(d->value, max_order);
        std::copy(m.values().begin(), m.values().end(), out);
    });
}

void gqd_distribution_free(gqd_distribution* d) { delete d; }

gqd_status gqd_sample_moments(const double* data, size_t count, int max_order, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const gqd::MomentSequence m = gqd::sample_moments(view(data, count), max_order);
        std::copy(m.values().begin(), m.values().end(), out);
    });
}

gqd_status gqd_fit_gaussian(const double* data, size_t count, double* mean, double* stddev) {
    return guarded([&] {
        require(mean != nullptr && stddev != nullptr, "null output");
        const gqd::GaussianFit fit = gqd::fit_gaussian_mle(view(data, count));
        *mean = fit.mean;
        *stddev = fit.stddev;
    });
}

gqd_status gqd_silverman_bandwidth(const double* data, size_t count, double* bandwidth) {
    return guarded([&] {
        require(bandwidth != nullptr, "null output");
        *bandwidth = gqd::silverman_bandwidth(view(data, count));
    });
}

gqd_status gqd_kde_pdf(const double* data, size_t count, double bandwidth, const double* x, size_t nx,
                       double* out) {
    return guarded([&] {
        require(out != nullptr || nx == 0, "null output");
        const gqd::KernelDensity kd(view(data, count), bandwidth);
        const auto xs = view(x, nx);
        for (std::size_t i = 0; i < nx; ++i) out[i] = gqd::kde_pdf(kd, xs[i]);
    });
}

gqd_status gqd_solve_portfolio(const gqd_distribution* log_excess, double risk_free, double gamma, double* theta,
                               int* degenerate) {
    return guarded([&] {
        require(log_excess != nullptr && theta != nullptr, "null argument");
        const gqd::PortfolioSolution s =
            gqd::solve_portfolio(gqd::PortfolioProblem(log_excess->value, risk_free, gamma));
        *theta = s.theta;
        if (degenerate != nullptr) *degenerate = s.degenerate ? 1 : 0;
    });
}

gqd_status gqd_calibrate_returns(const double* stock, const double* risk_free, const double* inflation,
                                 size_t count, double* risk_free_out, double* log_excess_out) {
    return guarded([&] {
        require(risk_free_out != nullptr && log_excess_out != nullptr, "null output");
        gqd::ReturnsDataset ds;
        const auto s = view(stock, count);
        const auto r = view(risk_free, count);
        ds.stock.assign(s.begin(), s.end());
        ds.risk_free.assign(r.begin(), r.end());
        if (inflation != nullptr) ds.inflation.assign(inflation, inflation + count);
        const gqd::ReturnsCalibration cal = gqd::calibrate_returns(ds);
        *risk_free_out = cal.risk_free;
        std::copy(cal.log_excess.begin(), cal.log_excess.end(), log_excess_out);
    });
}

gqd_status gqd_portfolio_comparison(const double* log_excess, size_t count, double risk_free, const double* gammas,
                                    size_t gamma_count, int nodes, gqd_method np_method, gqd_portfolio_row* rows) {
    return guarded([&] {
        require(rows != nullptr || gamma_count == 0, "null output");
        const auto result = gqd::portfolio_comparison(view(log_excess, count), risk_free,
                                                      view(gammas, gamma_count), nodes, to_method(np_method));
        std::string failures;
        for (std::size_t i = 0; i < result.size(); ++i) {
            const auto& r = result[i];
            rows[i] = {r.gamma, r.theta_np, r.theta_gaussian, r.error, r.degenerate ? 1 : 0, r.failure.empty() ? 0 : 1};
            if (!r.failure.empty()) failures = r.failure;
        }
        // Row-level failures do not fail the call; the last message is kept.
        if (!failures.empty()) last_error = failures;
    });
}

gqd_status gqd_config_default(gqd_experiment_config** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = new gqd_experiment_config{};
    });
}

gqd_status gqd_config_parse(const char* text, gqd_experiment_config** out) {
    return guarded([&] {
        require(text != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        *out = new gqd_experiment_config{gqd::parse_config(text)};
    });
}

gqd_status gqd_config_set_replications(gqd_experiment_config* cfg, int replications) {
    return guarded([&] {
        require(cfg != nullptr, "null config");
        if (replications < 1) throw gqd::Error(gqd::ErrorCode::Config, "replications must be at least 1");
        cfg->value.replications = replications;
    });
}

gqd_status gqd_config_set_seed(gqd_experiment_config* cfg, uint64_t seed) {
    return guarded([&] {
        require(cfg != nullptr, "null config");
        cfg->value.seed = seed;
    });
}

gqd_status gqd_config_set_jobs(gqd_experiment_config* cfg, int jobs) {
    return guarded([&] {
        require(cfg != nullptr, "null config");
        if (jobs < 0) throw gqd::Error(gqd::ErrorCode::Config, "jobs must be non-negative");
        cfg->value.jobs = jobs;
    });
}

void gqd_config_free(gqd_experiment_config* cfg) { delete cfg; }

gqd_status gqd_run_experiment(const gqd_experiment_config* cfg, gqd_report** out) {
    return guarded([&] {
        require(cfg != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        auto r = std::make_unique<gqd_report>(gqd_report{gqd::run_experiment(cfg->value), {}, {}});
        r->csv = gqd::report_csv(r->value);
        r->tables = gqd::report_tables(r->value);
        *out = r.release();
    });
}

gqd_status gqd_report_csv(const gqd_report* r, char* buffer, size_t capacity, size_t* needed) {
    if (r == nullptr) return fail(GQD_ERR_INPUT, "null report");
    return copy_text(r->csv, buffer, capacity, needed);
}

gqd_status gqd_report_tables(const gqd_report* r, char* buffer, size_t capacity, size_t* needed) {
    if (r == nullptr) return fail(GQD_ERR_INPUT, "null report");
    return copy_text(r->tables, buffer, capacity, needed);
}

void gqd_report_free(gqd_report* r) { delete r; }

}  // extern "C"
