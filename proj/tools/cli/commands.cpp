#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "gqdisc/gqdisc.h"

namespace gqdisc_cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Carries a non-zero library status out of a command.
struct LibraryError : std::runtime_error {
    LibraryError(gqd_status s, const std::string& what) : std::runtime_error(what), status(s) {}
    gqd_status status;
};

struct DistributionDeleter {
    void operator()(gqd_distribution* d) const { gqd_distribution_free(d); }
};
struct ConfigDeleter {
    void operator()(gqd_experiment_config* c) const { gqd_config_free(c); }
};
struct ReportDeleter {
    void operator()(gqd_report* r) const { gqd_report_free(r); }
};
using Distribution = std::unique_ptr<gqd_distribution, DistributionDeleter>;
using Config = std::unique_ptr<gqd_experiment_config, ConfigDeleter>;
using Report = std::unique_ptr<gqd_report, ReportDeleter>;

void check(gqd_status s) {
    if (s != GQD_OK) throw LibraryError(s, gqd_last_error());
}

std::string num(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int exit_code(gqd_status s) {
    switch (s) {
        case GQD_OK: return kExitOk;
        case GQD_ERR_INPUT:
        case GQD_ERR_CONFIG: return kExitUsage;
        default: return kExitNumerical;
    }
}

// Output goes to `path`, or to `fallback` when path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot write '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

std::vector<double> read_column(const std::string& path, const std::string& column) {
    const CsvTable t = read_csv(path);
    return t.numbers(t.column(column));
}

gqd_method method_from(const std::string& name) {
    gqd_method m{};
    if (gqd_method_from_name(name.c_str(), &m) != GQD_OK) throw UsageError(gqd_last_error());
    return m;
}

std::vector<double> parse_gammas(const std::string& text) {
    std::vector<double> out;
    auto to_d = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("bad gamma specification '" + text + "'");
        }
    };
    if (text.find(':') != std::string::npos) {
        // lo:hi:step
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw UsageError("gamma range must look like lo:hi:step");
        const double lo = to_d(parts[0]), hi = to_d(parts[1]), step = to_d(parts[2]);
        if (!(step > 0.0) || hi < lo) throw UsageError("bad gamma range '" + text + "'");
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(to_d(p));
    }
    if (out.empty()) throw UsageError("empty gamma list");
    return out;
}

struct DiscretizeArgs {
    std::string input, column = "0", method = "np-gq", output;
    int nodes = 5;
    int max_nodes = 9;
    bool verify = false;
};

int cmd_discretize(const DiscretizeArgs& a, std::ostream& out, std::ostream& err) {
    const std::vector<double> data = read_column(a.input, a.column);
    const gqd_method method = method_from(a.method);

    gqd_distribution* raw = nullptr;
    const gqd_status s = gqd_discretize(method, data.data(), data.size(), a.nodes, a.max_nodes, &raw);
    if (s != GQD_OK) {
        std::string msg = gqd_last_error();
        if (s == GQD_ERR_DEGENERATE) msg += "; reduce N (N = 1 always succeeds)";
        throw LibraryError(s, msg);
    }
    const Distribution d(raw);

    const std::size_t n = gqd_distribution_size(d.get());
    std::vector<double> x(n), w(n);
    check(gqd_distribution_get(d.get(), x.data(), w.data(), n));

    Sink sink(a.output, out);
    sink.stream() << "node,weight\n";
    for (std::size_t i = 0; i < n; ++i) sink.stream() << num(x[i]) << ',' << num(w[i]) << '\n';

    if (a.verify) {
        int order = 2 * a.nodes - 1;
        if (method == GQD_METHOD_GAUSS_HERMITE) order = std::min(order, 2);
        if (method == GQD_METHOD_NP_ME) order = a.nodes >= 5 ? 4 : 2;
        std::vector<double> sample(static_cast<std::size_t>(order) + 1), fitted(sample.size());
        check(gqd_sample_moments(data.data(), data.size(), order, sample.data()));
        check(gqd_distribution_moments(d.get(), order, fitted.data()));
        double worst = 0.0;
        for (std::size_t k = 0; k < sample.size(); ++k) {
            worst = std::max(worst, std::abs(fitted[k] - sample[k]) / std::max(1.0, std::abs(sample[k])));
        }
        err << "max relative moment error (orders 0.." << order << "): " << num(worst) << '\n';
    }
    return kExitOk;
}

struct PortfolioArgs {
    std::string input, stock = "stock", risk_free = "risk_free", inflation, gamma = "1:7:0.5", method = "np-gq",
                       output;
    int nodes = 5;
};

int cmd_portfolio(const PortfolioArgs& a, std::ostream& out, std::ostream& err) {
    const CsvTable t = read_csv(a.input);
    const std::vector<double> stock = t.numbers(t.column(a.stock));
    const std::vector<double> rf = t.numbers(t.column(a.risk_free));
    std::vector<double> infl;
    if (!a.inflation.empty()) infl = t.numbers(t.column(a.inflation));
    const std::vector<double> gammas = parse_gammas(a.gamma);
    const gqd_method method = method_from(a.method);

    double risk_free = 0.0;
    std::vector<double> x(stock.size());
    check(gqd_calibrate_returns(stock.data(), rf.data(), infl.empty() ? nullptr : infl.data(), stock.size(),
                                &risk_free, x.data()));
    err << "calibrated gross risk-free rate: " << num(risk_free) << '\n';

    std::vector<gqd_portfolio_row> rows(gammas.size());
    check(gqd_portfolio_comparison(x.data(), x.size(), risk_free, gammas.data(), gammas.size(), a.nodes, method,
                                   rows.data()));

    Sink sink(a.output, out);
    sink.stream() << "gamma,theta_np,theta_gaussian,error,status\n";
    for (const auto& r : rows) {
        const char* status = r.failed ? "failed" : (r.degenerate ? "degenerate" : "ok");
        if (r.failed) {
            sink.stream() << num(r.gamma) << ",NA,NA,NA," << status << '\n';
        } else {
            sink.stream() << num(r.gamma) << ',' << num(r.theta_np) << ',' << num(r.theta_gaussian) << ','
                          << num(r.error) << ',' << status << '\n';
        }
    }
    return kExitOk;
}

struct ExperimentArgs {
    std::string config, output, tables;
    std::optional<int> jobs, replications;
    std::optional<std::uint64_t> seed;
    bool smoke = false;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
    gqd_experiment_config* raw = nullptr;
    if (a.config.empty()) {
        check(gqd_config_default(&raw));
    } else {
        std::ifstream f(a.config);
        if (!f) throw UsageError("cannot open config '" + a.config + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        check(gqd_config_parse(ss.str().c_str(), &raw));
    }
    const Config cfg(raw);
    if (a.smoke) check(gqd_config_set_replications(cfg.get(), 10));
    if (a.replications) check(gqd_config_set_replications(cfg.get(), *a.replications));
    if (a.seed) check(gqd_config_set_seed(cfg.get(), *a.seed));
    if (a.jobs) check(gqd_config_set_jobs(cfg.get(), *a.jobs));

    gqd_report* rep = nullptr;
    check(gqd_run_experiment(cfg.get(), &rep));
    const Report report(rep);

    auto text = [&](auto getter) {
        std::size_t needed = 0;
        check(getter(report.get(), nullptr, 0, &needed));
        std::string s(needed + 1, '\0');
        check(getter(report.get(), s.data(), s.size(), &needed));
        s.resize(needed);
        return s;
    };
    const std::string csv = text(gqd_report_csv);
    const std::string tables = text(gqd_report_tables);

    Sink csv_sink(a.output, out);
    csv_sink.stream() << csv;
    if (!a.tables.empty()) {
        Sink table_sink(a.tables, out);
        table_sink.stream() << tables;
    } else if (!a.output.empty()) {
        out << tables;
    } else {
        err << tables;
    }
    return kExitOk;
}

struct PlotArgs {
    std::string input, column = "0", output;
    int bins = 20;
};

constexpr int kCurvePoints = 512;

int cmd_plotdata(const PlotArgs& a, std::ostream& out, std::ostream&) {
    if (a.bins < 1) throw UsageError("--bins must be at least 1");
    const std::vector<double> data = read_column(a.input, a.column);

    double mean = 0.0, sd = 0.0, h = 0.0;
    check(gqd_fit_gaussian(data.data(), data.size(), &mean, &sd));
    check(gqd_silverman_bandwidth(data.data(), data.size(), &h));

    const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi - lo) / a.bins;
    std::vector<std::size_t> counts(static_cast<std::size_t>(a.bins), 0);
    for (double x : data) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        counts[std::min(b, counts.size() - 1)]++;
    }

    std::vector<double> grid(kCurvePoints), kde(kCurvePoints);
    const double g_lo = lo - 3.0 * h, g_hi = hi + 3.0 * h;
    for (int i = 0; i < kCurvePoints; ++i) grid[i] = g_lo + (g_hi - g_lo) * i / (kCurvePoints - 1);
    check(gqd_kde_pdf(data.data(), data.size(), h, grid.data(), grid.size(), kde.data()));

    Sink sink(a.output, out);
    auto& os = sink.stream();
    os << "series,x,x_right,y\n";
    const double total = static_cast<double>(data.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double left = lo + width * static_cast<double>(b);
        const double right = b + 1 == counts.size() ? hi : left + width;
        os << "histogram," << num(left) << ',' << num(right) << ',' << num(counts[b] / (total * width)) << '\n';
    }
    for (int i = 0; i < kCurvePoints; ++i) os << "kde," << num(grid[i]) << ",," << num(kde[i]) << '\n';
    const double inv = 1.0 / (sd * std::sqrt(2.0 * M_PI));
    for (int i = 0; i < kCurvePoints; ++i) {
        const double z = (grid[i] - mean) / sd;
        os << "gaussian," << num(grid[i]) << ",," << num(inv * std::exp(-0.5 * z * z)) << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discretize empirical distributions with Gaussian quadrature"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gqd_version()));

    DiscretizeArgs da;
    auto* disc = app.add_subcommand("discretize", "Discretize one CSV column into nodes and weights");
    disc->add_option("input", da.input, "CSV file with a header row")->required();
    disc->add_option("-c,--column", da.column, "Column name or 0-based index");
    disc->add_option("-n,--n", da.nodes, "Number of nodes");
    disc->add_option("-m,--method", da.method, "np-gq, gauss-hermite or np-me");
    disc->add_option("--max-n", da.max_nodes, "Largest N accepted");
    disc->add_option("-o,--output", da.output, "Output CSV (default: stdout)");
    disc->add_flag("--verify", da.verify, "Report the largest relative moment mismatch");

    PortfolioArgs pa;
    auto* port = app.add_subcommand("portfolio", "Optimal stock share, nonparametric versus Gaussian");
    port->add_option("input", pa.input, "CSV with gross stock and risk-free returns")->required();
    port->add_option("--stock", pa.stock, "Gross stock return column");
    port->add_option("--risk-free", pa.risk_free, "Gross risk-free return column");
    port->add_option("--inflation", pa.inflation, "Gross inflation column (optional)");
    port->add_option("-g,--gamma", pa.gamma, "Risk aversions: lo:hi:step or a comma list");
    port->add_option("-n,--n", pa.nodes, "Number of nodes");
    port->add_option("-m,--method", pa.method, "Nonparametric method: np-gq or np-me");
    port->add_option("-o,--output", pa.output, "Output CSV (default: stdout)");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "Monte Carlo accuracy study");
    exp->add_option("--config", ea.config, "key = value configuration file");
    exp->add_option("-o,--output", ea.output, "Report CSV (default: stdout)");
    exp->add_option("--tables", ea.tables, "Formatted tables file");
    exp->add_option("-j,--jobs", ea.jobs, "Worker threads (0: all cores)");
    exp->add_option("--seed", ea.seed, "Random seed");
    exp->add_option("--replications", ea.replications, "Monte Carlo replications");
    exp->add_flag("--smoke", ea.smoke, "Ten replications only");

    PlotArgs pla;
    auto* plot = app.add_subcommand("plotdata", "Histogram, kernel density and fitted normal curves");
    plot->add_option("input", pla.input, "CSV file with a header row")->required();
    plot->add_option("-c,--column", pla.column, "Column name or 0-based index");
    plot->add_option("-b,--bins", pla.bins, "Histogram bins");
    plot->add_option("-o,--output", pla.output, "Output CSV (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (disc->parsed()) return cmd_discretize(da, out, err);
        if (port->parsed()) return cmd_portfolio(pa, out, err);
        if (exp->parsed()) return cmd_experiment(ea, out, err);
        if (plot->parsed()) return cmd_plotdata(pla, out, err);
    } catch (const LibraryError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.status);
    } catch (const CsvError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace gqdisc_cli
