#include "levytrunc/conditions.hpp"
#include "levytrunc/errors.hpp"
#include "levytrunc/estimator.hpp"
#include "levytrunc/experiment_config.hpp"
#include "levytrunc/ingest.hpp"
#include "levytrunc/levy_model.hpp"
#include "levytrunc/limitlaw.hpp"
#include "levytrunc/pathsim.hpp"
#include "levytrunc/rho.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef LEVYTRUNC_VERSION
#define LEVYTRUNC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace levytrunc;
using nlohmann::json;

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

enum Exit { ok = 0, config_error = 2, data_error = 3, internal_error = 4 };

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Inline JSON, or a path to a JSON file.
json load_json(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && arg[first] == '{') {
        try {
            return json::parse(arg);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed inline JSON: ") + e.what());
        }
    }
    std::ifstream is(arg);
    if (!is) {
        throw ConfigError("cannot open " + arg);
    }
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + arg + ": " + e.what());
    }
}

RhoFunction load_rho(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') {
        return RhoFunction::from_json(load_json(arg));
    }
    return RhoFunction::parse(arg);
}

json manifest(const std::string& command, const json& args, std::uint64_t seed) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(args.dump())));
    return {{"tool", "levytrunc"},
            {"version", LEVYTRUNC_VERSION},
            {"command", command},
            {"config", args},
            {"config_hash", hash},
            {"seed", seed}};
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream os(path);
    if (!os) {
        throw DataError("cannot write " + path.string());
    }
    os << j.dump(2) << '\n';
}

struct GridArg {
    double from = 0.0;
    double to = 0.0;
    std::size_t steps = 0;
};

// "t0:t1:steps" gives steps + 1 evenly spaced points from t0 to t1.
GridArg parse_grid(const std::string& s) {
    GridArg g;
    const auto a = s.find(':');
    const auto b = s.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw ConfigError("grid must look like t0:t1:steps");
    }
    try {
        std::size_t used = 0;
        g.from = std::stod(s.substr(0, a));
        g.to = std::stod(s.substr(a + 1, b - a - 1));
        const long long steps = std::stoll(s.substr(b + 1), &used);
        if (steps < 1 || used != s.size() - b - 1) {
            throw ConfigError("grid steps must be a positive integer");
        }
        g.steps = static_cast<std::size_t>(steps);
    } catch (const std::logic_error&) {
        throw ConfigError("grid must look like t0:t1:steps");
    }
    if (!(g.from < g.to)) {
        throw ConfigError("grid needs t0 < t1");
    }
    return g;
}

int run_check_conditions(double beta, double zeta, double tau, const std::optional<double>& y, bool table_only,
                         bool json_only) {
    const PrimaryConstants pc = derive_primary(beta, zeta, tau);
    const AlternateConstants ac = derive_alternate(pc);
    std::optional<SchemeCheckReport> scheme;
    if (y) {
        scheme = check_scheme(pc, *y);
    }
    if (table_only) {
        std::cout << constants_table(pc, ac, scheme);
        return ok;
    }
    if (!json_only) {
        std::cerr << constants_table(pc, ac, scheme);
    }
    std::cout << constants_report(pc, ac, scheme).dump(2) << '\n';
    return ok;
}

struct SimulateArgs {
    std::string model;
    std::size_t n = 0;
    std::optional<double> delta;
    std::optional<double> y;
    double gamma = 0.0;
    double drift = 0.0;
    double sigma = 0.0;
    double bound = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t replication = 0;
    std::string small_jumps = "gaussian";
    std::optional<double> u_cut;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    const LevyModel model = LevyModel::from_json(load_json(a.model));
    const ObservationScheme scheme =
        a.y ? ObservationScheme::from_rate(a.n, *a.y, a.gamma) : ObservationScheme::from_delta(a.n, *a.delta, a.gamma);
    const CoefficientSpec coeffs = CoefficientSpec::constant(a.drift, a.sigma, a.bound);
    SimulationOptions opt;
    opt.replication = a.replication;
    opt.u_cut = a.u_cut;
    if (a.small_jumps != "gaussian" && a.small_jumps != "off") {
        throw ConfigError("--small-jumps must be gaussian or off");
    }
    opt.small_jumps = a.small_jumps == "gaussian" ? SmallJumpMode::gaussian : SmallJumpMode::off;

    json args = {{"model", model.to_json()},
                 {"scheme", scheme.to_json()},
                 {"coefficients", coeffs.to_json()},
                 {"replication", a.replication},
                 {"small_jumps", a.small_jumps}};
    args["u_cut"] = a.u_cut ? json(*a.u_cut) : json(nullptr);
    json meta = manifest("simulate", args, a.seed);
    const fs::path csv(a.out);
    const fs::path sidecar = fs::path(a.out).concat(".json");
    write_json(sidecar, meta);

    const IncrementPath path = simulate_increments(model, coeffs, scheme, a.seed, opt);
    std::ofstream os(csv);
    if (!os) {
        throw DataError("cannot write " + csv.string());
    }
    write_path_csv(path, os);
    meta["path"] = path_metadata(path, model);
    write_json(sidecar, meta);
    return ok;
}

struct EstimateArgs {
    std::string input;
    std::string format = "increments";
    std::optional<double> delta;
    std::string rho;
    double gamma = 0.0;
    std::string grid;
    double level = 0.95;
    std::string out;
};

int run_estimate(const EstimateArgs& a) {
    const InputFormat format = parse_input_format(a.format);
    const RhoFunction rho = load_rho(a.rho);
    const GridArg grid = parse_grid(a.grid);
    if (format == InputFormat::increments && !a.delta) {
        throw ConfigError("increment input needs --delta");
    }
    if (format == InputFormat::prices && a.delta) {
        throw ConfigError("--delta is inferred from the timestamps of price input");
    }
    const IngestResult data = ingest_csv(a.input, format);
    const double delta = data.delta_n ? *data.delta_n : *a.delta;
    const ObservationScheme scheme = ObservationScheme::from_delta(data.increments.size(), delta, a.gamma);
    const TruncatedLDF ldf = TruncatedLDF::estimate(data.increments, scheme, rho);

    std::ofstream file;
    if (!a.out.empty()) {
        json args = {{"input", a.input}, {"format", a.format},     {"delta_n", delta},
                     {"rho", rho.to_json()}, {"gamma", a.gamma},   {"grid", a.grid},
                     {"level", a.level},    {"n", scheme.n()},     {"v_n", scheme.v_n()}};
        write_json(fs::path(a.out).concat(".json"), manifest("estimate", args, 0));
        file.open(a.out);
        if (!file) {
            throw DataError("cannot write " + a.out);
        }
    }
    std::ostream& os = a.out.empty() ? std::cout : file;
    os << "t,N_bar,lo,hi\n";
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        const double t = k == grid.steps
                             ? grid.to
                             : grid.from + (grid.to - grid.from) * static_cast<double>(k) / static_cast<double>(grid.steps);
        const Band band = confidence_band(ldf, t, a.level);
        os << fmt17(t) << ',' << fmt17(ldf(t)) << ',' << fmt17(band.lo) << ',' << fmt17(band.hi) << '\n';
    }
    return ok;
}

int run_verify_clt(const std::string& config_path, const std::string& out, const std::optional<unsigned>& threads) {
    ExperimentConfig config = ExperimentConfig::from_json(load_json(config_path));
    if (threads) {
        config.threads = *threads;
    }
    const fs::path dir = out.empty() ? fs::path(config.output_dir) : fs::path(out);
    json m = manifest("verify-clt", config.to_json(), config.seed);
    m["config_hash"] = config.hash();
    write_json(dir / "manifest.json", m);

    std::signal(SIGINT, on_sigint);
    const CltReport report = run_clt_experiment(config, &g_cancel);
    report.write(dir.string());
    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    if (report.partial) {
        std::cerr << "interrupted: partial report with " << report.completed << " of " << config.replications
                  << " replications\n";
    }
    std::cerr << "report written to " << dir.string() << '\n';
    return ok;
}

struct BiasArgs {
    std::string model = R"({"family":"exp_jump","c":1,"lambda":1})";
    std::string f = "poly:p=2";
    double gamma = 0.0;
    int kmin = 4;
    int kmax = 14;
    std::string method = "exact";
    std::size_t samples = 1000000;
    std::uint64_t seed = 1;
    std::string out;
};

int run_bias_study(const BiasArgs& a) {
    const LevyModel model = LevyModel::from_json(load_json(a.model));
    const RhoFunction f = load_rho(a.f);
    BiasStudyConfig cfg;
    cfg.gamma = a.gamma;
    cfg.deltas = dyadic_ladder(a.kmin, a.kmax);
    if (a.method == "exact") {
        cfg.method = BiasMethod::exact_one_jump;
    } else if (a.method == "mc") {
        cfg.method = BiasMethod::monte_carlo;
    } else {
        throw ConfigError("--method must be exact or mc");
    }
    cfg.mc_samples = a.samples;
    cfg.seed = a.seed;

    std::ofstream file;
    if (!a.out.empty()) {
        json args = {{"model", model.to_json()}, {"f", f.to_json()},   {"gamma", a.gamma}, {"kmin", a.kmin},
                     {"kmax", a.kmax},           {"method", a.method}, {"samples", a.samples}};
        write_json(fs::path(a.out) / "manifest.json", manifest("bias-study", args, a.seed));
        file.open(fs::path(a.out) / "bias.csv");
        if (!file) {
            throw DataError("cannot write " + (fs::path(a.out) / "bias.csv").string());
        }
    }
    const auto rows = bias_study(model, [&f](double x) { return f(x); }, cfg);
    std::ostream& os = a.out.empty() ? std::cout : file;
    os << "delta,v_n,error,ratio,argsup,standard_error\n";
    for (const auto& r : rows) {
        os << fmt17(r.delta) << ',' << fmt17(r.v_n) << ',' << fmt17(r.error) << ',' << fmt17(r.ratio) << ','
           << fmt17(r.argsup) << ',' << fmt17(r.standard_error) << '\n';
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated empirical Levy distribution function: estimation and limit-theory checks"};
    app.set_version_flag("--version", LEVYTRUNC_VERSION);
    app.require_subcommand(1);

    auto* cc = app.add_subcommand("check-conditions", "Derive the constants for (beta, zeta, tau) and check a rate y");
    double beta = 0.0;
    double zeta = 0.0;
    double tau = 0.0;
    std::optional<double> y;
    bool table_only = false;
    bool json_only = false;
    cc->add_option("--beta", beta, "Blumenthal-Getoor bound")->required();
    cc->add_option("--zeta", zeta)->required();
    cc->add_option("--tau", tau)->required();
    cc->add_option("--y", y, "Rate exponent: delta_n = n^-y");
    cc->add_flag("--table-only", table_only, "Print only the table (to stdout)");
    cc->add_flag("--json-only", json_only, "Print only the JSON report");

    auto* sim = app.add_subcommand("simulate", "Simulate one path of increments to CSV");
    SimulateArgs sa;
    sim->add_option("--model", sa.model, "Model spec: inline JSON or a JSON file")->required();
    sim->add_option("--n", sa.n)->required();
    auto* sim_delta = sim->add_option("--delta", sa.delta);
    auto* sim_y = sim->add_option("--y", sa.y);
    sim_delta->excludes(sim_y);
    sim->add_option("--gamma", sa.gamma, "Truncation constant in v_n = gamma delta_n^(1/8)")->required();
    sim->add_option("--drift", sa.drift);
    sim->add_option("--sigma", sa.sigma);
    sim->add_option("--bound", sa.bound, "Bound A on |b| and |sigma|");
    sim->add_option("--seed", sa.seed);
    sim->add_option("--replication", sa.replication);
    sim->add_option("--small-jumps", sa.small_jumps, "gaussian or off");
    sim->add_option("--u-cut", sa.u_cut, "Jumps below this size are replaced by the small-jump approximation");
    sim->add_option("--out", sa.out, "CSV path; metadata goes to <out>.json")->required();

    auto* est = app.add_subcommand("estimate", "Evaluate the estimator and pointwise bands on a grid");
    EstimateArgs ea;
    est->add_option("--input", ea.input)->required();
    est->add_option("--format", ea.format, "increments or prices");
    est->add_option("--delta", ea.delta, "Sampling interval for increment input");
    est->add_option("--rho", ea.rho, "e.g. poly:p=5 or exp_bump:p=4")->required();
    est->add_option("--gamma", ea.gamma)->required();
    est->add_option("--grid", ea.grid, "t0:t1:steps")->required();
    est->add_option("--level", ea.level, "Pointwise confidence level");
    est->add_option("--out", ea.out, "CSV path (default stdout)");

    auto* clt = app.add_subcommand("verify-clt", "Run the Monte Carlo CLT battery");
    std::string config_path;
    std::string out_dir;
    std::optional<unsigned> threads;
    clt->add_option("--config", config_path)->required();
    clt->add_option("--out", out_dir, "Report directory (default: output_dir from the config)");
    clt->add_option("--threads", threads);

    auto* bias = app.add_subcommand("bias-study", "Bias of the truncated jump part across a dyadic ladder");
    BiasArgs ba;
    bias->add_option("--model", ba.model, "Model spec: inline JSON or a JSON file");
    bias->add_option("--f", ba.f, "Test function, in rho syntax");
    bias->add_option("--gamma", ba.gamma)->required();
    bias->add_option("--kmin", ba.kmin);
    bias->add_option("--kmax", ba.kmax);
    bias->add_option("--method", ba.method, "exact or mc");
    bias->add_option("--samples", ba.samples);
    bias->add_option("--seed", ba.seed);
    bias->add_option("--out", ba.out, "Output directory (default: CSV to stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (cc->parsed()) {
            return run_check_conditions(beta, zeta, tau, y, table_only, json_only);
        }
        if (sim->parsed()) {
            if (!sa.delta && !sa.y) {
                throw ConfigError("simulate needs --delta or --y");
            }
            return run_simulate(sa);
        }
        if (est->parsed()) {
            return run_estimate(ea);
        }
        if (clt->parsed()) {
            return run_verify_clt(config_path, out_dir, threads);
        }
        if (bias->parsed()) {
            return run_bias_study(ba);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return data_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal_error;
    }
    return internal_error;
}
