// Command-line surface for the skew Brownian motion library: density curves,
// exact sampling, path simulation, and the validation suites. Every command
// echoes its full configuration so a run is reproducible from the output
// alone. Exit codes: 0 success, 2 usage error, 3 domain error, 4 validation
// failure.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <skewbm/skewbm.hpp>

namespace {

using nlohmann::json;
using namespace skewbm;

struct RunConfig {
    std::string command;
    double z1 = 0.0, z2 = 1.0;
    double beta1 = 0.0, beta2 = 0.0;
    double mu = 0.0;
    double t = 1.0;
    double x = 0.5;
    double x0 = 0.5;
    long long n = 1000;
    std::uint64_t seed = 20260814;
    std::uint64_t stream = 0;
    int nmax = 10;
    double tol = 1e-10;
    double ymin = -3.0, ymax = 4.0;
    int ysteps = 141;
    double dt = 0.01;
    double horizon = 1.0;
    std::string suite = "normalization";
    std::string format;  // "csv" or "json"; empty = per-command default
    std::string out;     // output file path; empty = stdout

    SkewParams params() const { return {z1, z2, beta1, beta2, mu}; }
    TruncationPolicy policy() const { return {nmax, tol}; }
};

json config_json(const RunConfig& c) {
    return json{{"command", c.command}, {"z1", c.z1},       {"z2", c.z2},
                {"beta1", c.beta1},     {"beta2", c.beta2}, {"mu", c.mu},
                {"t", c.t},             {"x", c.x},         {"x0", c.x0},
                {"n", c.n},             {"seed", c.seed},   {"stream", c.stream},
                {"nmax", c.nmax},       {"tol", c.tol},     {"ymin", c.ymin},
                {"ymax", c.ymax},       {"ysteps", c.ysteps},
                {"dt", c.dt},           {"horizon", c.horizon},
                {"suite", c.suite},     {"format", c.format}};
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Resolve "--format" against the per-command default and open the sink.
struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Output(const RunConfig& cfg) {
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) throw std::domain_error("cannot open output file: " + cfg.out);
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

std::string resolve_format(const RunConfig& cfg, const char* fallback) {
    if (cfg.format.empty()) return fallback;
    if (cfg.format != "csv" && cfg.format != "json")
        throw std::invalid_argument("unknown format: " + cfg.format);
    return cfg.format;
}

int cmd_density(RunConfig cfg) {
    cfg.command = "density";
    const std::string fmt = resolve_format(cfg, "csv");
    if (cfg.ysteps < 1) throw std::invalid_argument("--ysteps must be at least 1");
    if (!(cfg.ymax >= cfg.ymin)) throw std::invalid_argument("--ymax must be >= --ymin");
    const SkewParams p = cfg.params();
    validate_params(p);
    if (p.mu != 0.0) validate_drift_regime(p);

    std::vector<double> ys;
    ys.reserve(static_cast<std::size_t>(cfg.ysteps) + 4);
    for (int i = 0; i < cfg.ysteps; ++i)
        ys.push_back(cfg.ysteps == 1
                         ? cfg.ymin
                         : cfg.ymin + (cfg.ymax - cfg.ymin) * i / (cfg.ysteps - 1.0));
    // The density is discontinuous at the barriers: report both one-sided
    // limits instead of a single ambiguous value.
    const double eps = 1e-9;
    for (double zb : {p.z1, p.z2})
        if (zb > cfg.ymin && zb < cfg.ymax) {
            ys.push_back(zb - eps);
            ys.push_back(zb + eps);
        }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::vector<DensityValue> rows;
    rows.reserve(ys.size());
    for (double y : ys)
        rows.push_back(p.mu == 0.0 ? density_driftless(cfg.t, cfg.x, y, p, cfg.policy())
                                   : density_two_barrier_drift(cfg.t, cfg.x, y, p, cfg.policy()));

    double max_bound = 0.0;
    int max_terms = 0;
    for (const DensityValue& r : rows) {
        max_bound = std::max(max_bound, r.error_bound);
        max_terms = std::max(max_terms, r.terms_used);
    }
    const json stats{{"rows", ys.size()}, {"max_error_bound", max_bound},
                     {"max_terms", max_terms}};

    Output sink(cfg);
    std::ostream& os = sink.stream();
    if (fmt == "csv") {
        os << "# config " << config_json(cfg).dump() << "\n";
        os << "y,density,error_bound,terms\n";
        for (std::size_t i = 0; i < ys.size(); ++i)
            os << num(ys[i]) << ',' << num(rows[i].value) << ',' << num(rows[i].error_bound)
               << ',' << rows[i].terms_used << "\n";
        os << "# stats " << stats.dump() << "\n";
    } else {
        json data = json::array();
        for (std::size_t i = 0; i < ys.size(); ++i)
            data.push_back(json{{"y", ys[i]},
                                {"density", rows[i].value},
                                {"error_bound", rows[i].error_bound},
                                {"terms", rows[i].terms_used},
                                {"exact_formula", rows[i].exact_formula}});
        os << json{{"config", config_json(cfg)}, {"data", data}, {"stats", stats}}.dump(2)
           << "\n";
    }
    return 0;
}

json sampler_stats_json(const RunConfig& cfg, const std::vector<AcceptanceRecord>& records,
                        long long n_samples) {
    const SampleStats st = acceptance_stats(records);
    return json{{"n_samples", n_samples},
                {"mean_decision_index", st.mean_decision_index},
                {"exact_fraction", st.exact_fraction},
                {"acceptance_rate", st.acceptance_rate},
                {"seed", cfg.seed},
                {"stream", cfg.stream},
                {"vbar", vbar(cfg.params())},
                {"delta_nmax", delta_n(cfg.params(), cfg.nmax)}};
}

int cmd_sample(RunConfig cfg) {
    cfg.command = "sample";
    const std::string fmt = resolve_format(cfg, "csv");
    if (cfg.n < 1) throw std::invalid_argument("--n must be at least 1");
    const SkewParams p = cfg.params();
    validate_params(p);

    RandomStream rng{cfg.seed, cfg.stream, 0};
    std::vector<AcceptanceRecord> records;
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(cfg.n));
    for (long long i = 0; i < cfg.n; ++i)
        draws.push_back(sample_transition(cfg.t, cfg.x, p, cfg.policy(), rng, &records).first);
    const json stats = sampler_stats_json(cfg, records, cfg.n);

    Output sink(cfg);
    std::ostream& os = sink.stream();
    if (fmt == "csv") {
        os << "# config " << config_json(cfg).dump() << "\n";
        os << "sample\n";
        for (double d : draws) os << num(d) << "\n";
        os << "# stats " << stats.dump() << "\n";
    } else {
        os << json{{"config", config_json(cfg)}, {"data", draws}, {"stats", stats}}.dump(2)
           << "\n";
    }
    return 0;
}

int cmd_path(RunConfig cfg) {
    cfg.command = "path";
    const std::string fmt = resolve_format(cfg, "csv");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("--dt must be positive");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("--horizon must be positive");
    const SkewParams p = cfg.params();
    validate_params(p);

    std::vector<double> times{0.0};
    for (int i = 1; i * cfg.dt < cfg.horizon - 1e-12 * std::max(1.0, cfg.horizon); ++i)
        times.push_back(i * cfg.dt);
    times.push_back(cfg.horizon);

    RandomStream rng{cfg.seed, cfg.stream, 0};
    const PathSample ps = sample_path(times, cfg.x0, p, cfg.policy(), rng);
    json stats = sampler_stats_json(cfg, ps.records, static_cast<long long>(times.size()) - 1);
    stats["steps"] = times.size() - 1;

    Output sink(cfg);
    std::ostream& os = sink.stream();
    if (fmt == "csv") {
        os << "# config " << config_json(cfg).dump() << "\n";
        os << "time,position\n";
        for (std::size_t i = 0; i < ps.times.size(); ++i)
            os << num(ps.times[i]) << ',' << num(ps.positions[i]) << "\n";
        os << "# stats " << stats.dump() << "\n";
    } else {
        json data = json::array();
        for (std::size_t i = 0; i < ps.times.size(); ++i)
            data.push_back(json{{"time", ps.times[i]}, {"position", ps.positions[i]}});
        os << json{{"config", config_json(cfg)}, {"data", data}, {"stats", stats}}.dump(2)
           << "\n";
    }
    return 0;
}

int cmd_validate(RunConfig cfg) {
    cfg.command = "validate";
    const std::string fmt = resolve_format(cfg, "json");

    SuiteConfig sc;
    sc.params = cfg.params();
    sc.policy = cfg.policy();
    sc.t = cfg.t;
    sc.x = cfg.x;
    sc.n = cfg.n;
    sc.dx = cfg.dt;
    sc.seed = cfg.seed;
    sc.stream = cfg.stream;
    const SuiteReport rep = run_suite(cfg.suite, sc);

    json checks = json::array();
    for (const CheckResult& c : rep.checks)
        checks.push_back(json{{"name", c.name},
                              {"pass", c.pass},
                              {"residual", c.residual},
                              {"tolerance", c.tolerance}});
    const json stats{{"suite", rep.suite}, {"pass", rep.pass()}};

    Output sink(cfg);
    std::ostream& os = sink.stream();
    if (fmt == "csv") {
        os << "# config " << config_json(cfg).dump() << "\n";
        os << "name,pass,residual,tolerance\n";
        for (const CheckResult& c : rep.checks)
            os << c.name << ',' << (c.pass ? 1 : 0) << ',' << num(c.residual) << ','
               << num(c.tolerance) << "\n";
        os << "# stats " << stats.dump() << "\n";
    } else {
        os << json{{"config", config_json(cfg)}, {"data", checks}, {"stats", stats}}.dump(2)
           << "\n";
    }
    return rep.pass() ? 0 : 4;
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--z1", cfg.z1, "Lower barrier");
    cmd->add_option("--z2", cfg.z2, "Upper barrier");
    cmd->add_option("--beta1", cfg.beta1, "Skewness at z1, in [-1, 1]");
    cmd->add_option("--beta2", cfg.beta2, "Skewness at z2, in [-1, 1]");
    cmd->add_option("--mu", cfg.mu, "Constant drift");
    cmd->add_option("--t", cfg.t, "Transition time");
    cmd->add_option("--x", cfg.x, "Starting point");
    cmd->add_option("--x0", cfg.x0, "Path starting point");
    cmd->add_option("--n", cfg.n, "Sample / walker count");
    cmd->add_option("--seed", cfg.seed, "Random seed");
    cmd->add_option("--stream", cfg.stream, "Random stream (shard) id");
    cmd->add_option("--nmax", cfg.nmax, "Series truncation cap");
    cmd->add_option("--tol", cfg.tol, "Series truncation tolerance");
    cmd->add_option("--ymin", cfg.ymin, "Density grid lower end");
    cmd->add_option("--ymax", cfg.ymax, "Density grid upper end");
    cmd->add_option("--ysteps", cfg.ysteps, "Density grid point count");
    cmd->add_option("--dt", cfg.dt, "Path time step / walk lattice spacing");
    cmd->add_option("--horizon", cfg.horizon, "Path time horizon");
    cmd->add_option("--suite", cfg.suite,
                    "Validation suite: normalization, transmission, chapman, balance, ks, "
                    "reduction, oracle-equivalence, walk");
    cmd->add_option("--format", cfg.format, "Output format: csv or json");
    cmd->add_option("--out", cfg.out, "Write output to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Transition densities and exact sampling for skew Brownian motion "
                 "with two semipermeable barriers"};
    app.require_subcommand(1);
    CLI::App* density = app.add_subcommand("density", "Evaluate the transition density on a grid");
    CLI::App* sample = app.add_subcommand("sample", "Draw exact transition samples");
    CLI::App* path = app.add_subcommand("path", "Simulate a path skeleton");
    CLI::App* validate = app.add_subcommand("validate", "Run a validation suite");
    for (CLI::App* cmd : {density, sample, path, validate}) add_common_options(cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 2;
    }

    try {
        if (density->parsed()) return cmd_density(cfg);
        if (sample->parsed()) return cmd_sample(cfg);
        if (path->parsed()) return cmd_path(cfg);
        return cmd_validate(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 3;
    }
}
