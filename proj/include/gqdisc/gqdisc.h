/*
 * gqdisc C API: discretize empirical distributions with Gaussian quadrature
 * from sample moments, compare against baseline discretizers, and solve the
 * one-period CRRA portfolio problem on the result.
 *
 * Every function returns a gqd_status. On failure, gqd_last_error() returns
 * a message describing the most recent error on the calling thread; the
 * pointer stays valid until the next failing call on that thread.
 *
 * Objects are opaque and owned by the caller; release them with the matching
 * *_free function. Functions are thread-safe as long as distinct threads do
 * not share a handle that one of them frees.
 */
#ifndef GQDISC_GQDISC_H
#define GQDISC_GQDISC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GQDISC_BUILDING)
#    define GQD_API __declspec(dllexport)
#  else
#    define GQD_API __declspec(dllimport)
#  endif
#else
#  define GQD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gqd_status {
    GQD_OK = 0,
    GQD_ERR_INPUT = 1,
    GQD_ERR_DEGENERATE = 2,
    GQD_ERR_NOT_POSITIVE_DEFINITE = 3,
    GQD_ERR_NUMERICAL = 4,
    GQD_ERR_INFEASIBLE = 5,
    GQD_ERR_DOMAIN = 6,
    GQD_ERR_UNBOUNDED = 7,
    GQD_ERR_CONFIG = 8,
    GQD_ERR_BUFFER = 9, /* output buffer too small; *needed is set */
    GQD_ERR_INTERNAL = 10
} gqd_status;

typedef enum gqd_method {
    GQD_METHOD_NP_GQ = 0,
    GQD_METHOD_GAUSS_HERMITE = 1,
    GQD_METHOD_NP_ME = 2
} gqd_method;

typedef struct gqd_distribution gqd_distribution;
typedef struct gqd_experiment_config gqd_experiment_config;
typedef struct gqd_report gqd_report;

GQD_API const char* gqd_version(void);
GQD_API const char* gqd_last_error(void);
GQD_API const char* gqd_status_string(gqd_status status);

/* Accepts "np-gq", "gauss-hermite", "np-me". */
GQD_API gqd_status gqd_method_from_name(const char* name, gqd_method* out);

/* ---- discrete distributions ------------------------------------------ */

/* max_nodes <= 0 selects the default cap of 9. */
GQD_API gqd_status gqd_discretize(gqd_method method, const double* data, size_t count, int nodes,
                                  int max_nodes, gqd_distribution** out);

/* Gaussian quadrature rule from raw moments m_0..m_{count-1}; count >= 2*nodes+1. */
GQD_API gqd_status gqd_golub_welsch(const double* moments, size_t count, int nodes, gqd_distribution** out);

/* Nodes must be strictly increasing and weights positive. */
GQD_API gqd_status gqd_distribution_create(const double* nodes, const double* weights, size_t count,
                                           gqd_distribution** out);

GQD_API size_t gqd_distribution_size(const gqd_distribution* d);

/* Either output pointer may be NULL. capacity is in elements. */
GQD_API gqd_status gqd_distribution_get(const gqd_distribution* d, double* nodes, double* weights,
                                        size_t capacity);

/* out receives max_order + 1 raw moments. */
GQD_API gqd_status gqd_distribution_moments(const gqd_distribution* d, int max_order, double* out);

GQD_API void gqd_distribution_free(gqd_distribution* d);

/* ---- data summaries --------------------------------------------------- */

GQD_API gqd_status gqd_sample_moments(const double* data, size_t count, int max_order, double* out);
GQD_API gqd_status gqd_fit_gaussian(const double* data, size_t count, double* mean, double* stddev);
GQD_API gqd_status gqd_silverman_bandwidth(const double* data, size_t count, double* bandwidth);
GQD_API gqd_status gqd_kde_pdf(const double* data, size_t count, double bandwidth, const double* x,
                               size_t nx, double* out);

/* ---- portfolio -------------------------------------------------------- */

/* log_excess holds log R - log R_f nodes. degenerate may be NULL. */
GQD_API gqd_status gqd_solve_portfolio(const gqd_distribution* log_excess, double risk_free, double gamma,
                                       double* theta, int* degenerate);

/* inflation may be NULL (returns already real). log_excess_out has count slots. */
GQD_API gqd_status gqd_calibrate_returns(const double* stock, const double* risk_free, const double* inflation,
                                         size_t count, double* risk_free_out, double* log_excess_out);

typedef struct gqd_portfolio_row {
    double gamma;
    double theta_np;
    double theta_gaussian;
    double error; /* theta_gaussian / theta_np - 1; NaN when undefined */
    int degenerate;
    int failed;
} gqd_portfolio_row;

/* Nonparametric (np_method) versus Gauss-Hermite portfolios on the same log
 * excess returns, one row per gamma. rows must hold gamma_count entries. */
GQD_API gqd_status gqd_portfolio_comparison(const double* log_excess, size_t count, double risk_free,
                                            const double* gammas, size_t gamma_count, int nodes,
                                            gqd_method np_method, gqd_portfolio_row* rows);

/* ---- Monte Carlo experiment ------------------------------------------ */

GQD_API gqd_status gqd_config_default(gqd_experiment_config** out);
/* Flat "key = value" text; see README for keys. */
GQD_API gqd_status gqd_config_parse(const char* text, gqd_experiment_config** out);
GQD_API gqd_status gqd_config_set_replications(gqd_experiment_config* cfg, int replications);
GQD_API gqd_status gqd_config_set_seed(gqd_experiment_config* cfg, uint64_t seed);
GQD_API gqd_status gqd_config_set_jobs(gqd_experiment_config* cfg, int jobs);
GQD_API void gqd_config_free(gqd_experiment_config* cfg);

GQD_API gqd_status gqd_run_experiment(const gqd_experiment_config* cfg, gqd_report** out);

/* Text outputs follow snprintf conventions: *needed receives the length
 * without the terminator; pass buffer = NULL to query it. */
GQD_API gqd_status gqd_report_csv(const gqd_report* r, char* buffer, size_t capacity, size_t* needed);
GQD_API gqd_status gqd_report_tables(const gqd_report* r, char* buffer, size_t capacity, size_t* needed);
GQD_API void gqd_report_free(gqd_report* r);

#ifdef __cplusplus
}
#endif

#endif /* GQDISC_GQDISC_H */
