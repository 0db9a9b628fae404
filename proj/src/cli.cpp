#include "hpa/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hpa/json_io.hpp"

namespace hpa::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string scenario;
    // physiology (defaults: standard human values)
    double T1 = 4.0, T2 = 19.9, T3 = 76.4;
    double xbar1 = 7.659, xbar2 = 21.0, xbar3 = 3055.0;
    bool physiology_present = false;
    // feedback shape
    double alpha = 6.0, eta = 1.0, mu = 1.0, c = 2000.0;
    bool feedback_present = false;
    std::optional<SystemParams> params; // direct parameter set, bypasses the fit
    std::optional<KernelSet> kernels;
    DiracDelays delays;
    bool delays_present = false;
    double q = 0.9;
    // solver settings
    double t_end = 5000.0, step = 0.01;
    double x3_perturbation = 1.01;
    OscillationThresholds thresholds;
    // region scan
    RegionScanOptions scan;
};

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            known = known || key == a;
        if (!known)
            throw validation_error("config." + where + ": unknown key '" + key + "'");
    }
}

double number(const json& j, const char* key, const std::string& where) {
    if (!j.at(key).is_number())
        throw validation_error("config." + where + ": '" + key +
                               "' must be a number");
    return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, const std::string& where,
                 double fallback) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

// concentration given as <base>_pg_ml or <base>_ng_ml (exactly one)
double concentration(const json& j, const std::string& base,
                     const std::string& where, double fallback) {
    const std::string pg = base + "_pg_ml", ng = base + "_ng_ml";
    const bool has_pg = j.contains(pg), has_ng = j.contains(ng);
    if (has_pg && has_ng)
        throw validation_error("config." + where + ": give exactly one of '" + pg +
                               "' and '" + ng + "'");
    if (has_pg)
        return number(j, pg.c_str(), where);
    if (has_ng)
        return 1000.0 * number(j, ng.c_str(), where);
    return fallback;
}

KernelKind kind_from_string(const std::string& s) {
    if (s == "dirac")
        return KernelKind::dirac;
    if (s == "gamma")
        return KernelKind::gamma;
    if (s == "mixed")
        return KernelKind::mixed;
    throw validation_error("kind must be dirac, gamma or mixed");
}

RunConfig parse_config(const json& j) {
    reject_unknown(j,
                   {"schema_version", "scenario", "physiology", "feedback",
                    "params", "kernels", "delays", "fractional", "solver", "scan"},
                   "root");
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != 1)
        throw validation_error("config: schema_version must be present and equal 1");

    RunConfig cfg;
    if (j.contains("scenario"))
        cfg.scenario = j.at("scenario").get<std::string>();

    if (j.contains("physiology")) {
        const auto& ph = j.at("physiology");
        reject_unknown(ph,
                       {"T1_min", "T2_min", "T3_min", "xbar1_pg_ml", "xbar1_ng_ml",
                        "xbar2_pg_ml", "xbar2_ng_ml", "xbar3_pg_ml", "xbar3_ng_ml"},
                       "physiology");
        cfg.T1 = number_or(ph, "T1_min", "physiology", cfg.T1);
        cfg.T2 = number_or(ph, "T2_min", "physiology", cfg.T2);
        cfg.T3 = number_or(ph, "T3_min", "physiology", cfg.T3);
        cfg.xbar1 = concentration(ph, "xbar1", "physiology", cfg.xbar1);
        cfg.xbar2 = concentration(ph, "xbar2", "physiology", cfg.xbar2);
        cfg.xbar3 = concentration(ph, "xbar3", "physiology", cfg.xbar3);
        cfg.physiology_present = true;
    }
    if (j.contains("feedback")) {
        const auto& fb = j.at("feedback");
        reject_unknown(fb, {"alpha", "eta", "mu", "c_pg_ml", "c_ng_ml"}, "feedback");
        cfg.alpha = number_or(fb, "alpha", "feedback", cfg.alpha);
        cfg.eta = number_or(fb, "eta", "feedback", cfg.eta);
        cfg.mu = number_or(fb, "mu", "feedback", cfg.mu);
        cfg.c = concentration(fb, "c", "feedback", cfg.c);
        cfg.feedback_present = true;
    }
    if (j.contains("params"))
        cfg.params = params_from_json(j.at("params"));
    if (j.contains("kernels"))
        cfg.kernels = kernel_set_from_json(j.at("kernels"));
    if (j.contains("delays")) {
        const auto& d = j.at("delays");
        reject_unknown(d, {"tau1_min", "tau2_min", "tau31_min", "tau32_min"},
                       "delays");
        cfg.delays.tau1 = number_or(d, "tau1_min", "delays", 0.0);
        cfg.delays.tau2 = number_or(d, "tau2_min", "delays", 0.0);
        cfg.delays.tau31 = number_or(d, "tau31_min", "delays", 0.0);
        cfg.delays.tau32 = number_or(d, "tau32_min", "delays", 0.0);
        cfg.delays_present = true;
    }
    if (j.contains("fractional")) {
        const auto& f = j.at("fractional");
        reject_unknown(f, {"q"}, "fractional");
        cfg.q = number_or(f, "q", "fractional", cfg.q);
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        reject_unknown(s,
                       {"t_end_min", "step_min", "transient_fraction",
                        "x3_perturbation", "amplitude_rel", "period_cv",
                        "converged_rel"},
                       "solver");
        cfg.t_end = number_or(s, "t_end_min", "solver", cfg.t_end);
        cfg.step = number_or(s, "step_min", "solver", cfg.step);
        cfg.x3_perturbation =
            number_or(s, "x3_perturbation", "solver", cfg.x3_perturbation);
        cfg.thresholds.transient_fraction = number_or(
            s, "transient_fraction", "solver", cfg.thresholds.transient_fraction);
        cfg.thresholds.amplitude_rel =
            number_or(s, "amplitude_rel", "solver", cfg.thresholds.amplitude_rel);
        cfg.thresholds.period_cv =
            number_or(s, "period_cv", "solver", cfg.thresholds.period_cv);
        cfg.thresholds.converged_rel =
            number_or(s, "converged_rel", "solver", cfg.thresholds.converged_rel);
    }
    if (j.contains("scan")) {
        const auto& s = j.at("scan");
        reject_unknown(s,
                       {"kind", "n", "c_min_pg_ml", "c_max_pg_ml", "eta_min",
                        "eta_max", "grid_c", "grid_eta"},
                       "scan");
        if (s.contains("kind"))
            cfg.scan.kind = kind_from_string(s.at("kind").get<std::string>());
        cfg.scan.n = static_cast<int>(number_or(s, "n", "scan", cfg.scan.n));
        cfg.scan.c_min = number_or(s, "c_min_pg_ml", "scan", cfg.scan.c_min);
        cfg.scan.c_max = number_or(s, "c_max_pg_ml", "scan", cfg.scan.c_max);
        cfg.scan.eta_min = number_or(s, "eta_min", "scan", cfg.scan.eta_min);
        cfg.scan.eta_max = number_or(s, "eta_max", "scan", cfg.scan.eta_max);
        cfg.scan.grid_c = static_cast<int>(number_or(s, "grid_c", "scan", cfg.scan.grid_c));
        cfg.scan.grid_eta =
            static_cast<int>(number_or(s, "grid_eta", "scan", cfg.scan.grid_eta));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw validation_error("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw validation_error("config: invalid JSON in '" + path + "': " + ex.what());
    }
    if (!j.is_object())
        throw validation_error("config: root must be a JSON object");
    return parse_config(j);
}

SystemParams config_params(const RunConfig& cfg) {
    if (cfg.params)
        return *cfg.params;
    return fit_params(cfg.T1, cfg.T2, cfg.T3, cfg.xbar1, cfg.xbar2, cfg.xbar3,
                      cfg.alpha, cfg.eta, cfg.mu, cfg.c);
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

void atomic_write(const fs::path& target, const std::string& content) {
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw solver_error("cannot open output file " + tmp.string());
        out << content;
        if (!out)
            throw solver_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

struct Output {
    std::string dir;

    void emit(const std::string& name, const std::string& content,
              bool to_stdout) const {
        if (!dir.empty()) {
            fs::create_directories(dir);
            atomic_write(fs::path(dir) / name, content);
        }
        if (to_stdout || dir.empty())
            std::cout << content;
    }
};

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_fit(const RunConfig& cfg, const Output& out) {
    if (!cfg.physiology_present || !cfg.feedback_present)
        throw validation_error("fit: config must provide physiology and feedback "
                               "blocks");
    const auto p = config_params(cfg);
    const auto e = find_equilibrium(p);
    const auto rep = check_inequalities(p, e);
    json j{{"params", to_json(p)},
           {"equilibrium", to_json(e)},
           {"stability", to_json(rep)}};
    out.emit("fit.json", j.dump(2) + "\n", true);
    return exit_ok;
}

int cmd_stability(const RunConfig& cfg, const Output& out) {
    const auto p = config_params(cfg);
    const auto e = find_equilibrium(p);
    json j = to_json(check_inequalities(p, e));
    out.emit("stability.json", j.dump(2) + "\n", true);
    return exit_ok;
}

int cmd_critical(const RunConfig& cfg, const Output& out, const std::string& kind,
                 int n, double beta, int p_count) {
    const auto p = config_params(cfg);
    const auto e = find_equilibrium(p);
    json j;
    switch (kind_from_string(kind)) {
    case KernelKind::dirac: {
        json arr = json::array();
        for (const auto& cp : dirac_critical(p, e, p_count))
            arr.push_back(to_json(cp));
        j = std::move(arr);
        break;
    }
    case KernelKind::gamma: {
        const auto cp = gamma_critical(p, e, n);
        j = to_json(cp);
        j["total_mean_delay"] = n * cp.parameter;
        break;
    }
    case KernelKind::mixed: {
        json arr = json::array();
        for (const auto& cp : mixed_critical(p, e, n, beta, p_count))
            arr.push_back(to_json(cp));
        j = std::move(arr);
        break;
    }
    }
    out.emit("critical.json", j.dump(2) + "\n", true);
    return exit_ok;
}

int cmd_region_scan(const RunConfig& cfg, const Output& out,
                    const std::string& format) {
    RegionScanOptions opts = cfg.scan;
    opts.alpha = cfg.alpha;
    opts.T1 = cfg.T1;
    opts.T2 = cfg.T2;
    opts.T3 = cfg.T3;
    opts.xbar1 = cfg.xbar1;
    opts.xbar2 = cfg.xbar2;
    opts.xbar3 = cfg.xbar3;
    const auto grid = region_scan(opts);
    if (format == "json") {
        out.emit("region.json", to_json(grid).dump(2) + "\n", true);
    } else {
        std::ostringstream os;
        write_region_csv(os, grid);
        out.emit("region.csv", os.str(), true);
    }
    return exit_ok;
}

Trajectory run_trajectory(const RunConfig& cfg, const SystemParams& p,
                          const Equilibrium& e) {
    const auto hist = default_history(e, cfg.x3_perturbation);
    if (cfg.kernels)
        return integrate_kernels(p, *cfg.kernels, hist, cfg.t_end, cfg.step);
    if (cfg.delays_present)
        return integrate_dirac(p, cfg.delays, hist, cfg.t_end, cfg.step);
    throw validation_error("simulate: provide a kernel set or a delays block");
}

int cmd_simulate(const RunConfig& cfg, const Output& out) {
    const auto p = config_params(cfg);
    const auto e = find_equilibrium(p);
    const auto tr = run_trajectory(cfg, p, e);
    const auto rep = detect_oscillation(tr, e, cfg.thresholds);
    if (!out.dir.empty()) {
        std::ostringstream os;
        write_trajectory_csv(os, tr);
        out.emit("trajectory.csv", os.str(), false);
    }
    out.emit("oscillation.json", to_json(rep).dump(2) + "\n", true);
    return exit_ok;
}

int cmd_simulate_frac(const RunConfig& cfg, const Output& out) {
    const auto p = config_params(cfg);
    const auto e = find_equilibrium(p);
    FracConfig fc;
    fc.q = cfg.q;
    fc.taus = cfg.delays;
    fc.t_end = cfg.t_end;
    fc.h = cfg.step;
    const auto tr = integrate_fractional(p, fc, default_history(e, cfg.x3_perturbation));
    const auto rep = detect_oscillation(tr, e, cfg.thresholds);
    if (!out.dir.empty()) {
        std::ostringstream os;
        write_trajectory_csv(os, tr);
        out.emit("trajectory.csv", os.str(), false);
    }
    out.emit("oscillation.json", to_json(rep).dump(2) + "\n", true);
    return exit_ok;
}

} // namespace

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv) {
    CLI::App app{"HPA-axis delay model: equilibria, stability, Hopf critical "
                 "values and simulation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, output_dir, format = "csv";
    app.add_option("--config", config_path, "Scenario config JSON");
    app.add_option("--output-dir", output_dir, "Directory for output files");
    app.add_option("--format", format, "region-scan output format")
        ->check(CLI::IsMember({"json", "csv"}));

    // feedback/physiology overrides (mirror the config keys)
    std::optional<double> alpha, eta, mu, c_pg_ml, c_ng_ml;
    app.add_option("--alpha", alpha, "Hill exponent");
    app.add_option("--eta", eta, "CRH feedback inhibition fraction");
    app.add_option("--mu", mu, "ACTH feedback inhibition fraction");
    app.add_option("--c-pg-ml", c_pg_ml, "half-saturation concentration, pg/ml");
    app.add_option("--c-ng-ml", c_ng_ml, "half-saturation concentration, ng/ml");
    std::string params_path;
    app.add_option("--params", params_path, "SystemParams JSON file (skips the fit)");

    auto* fit = app.add_subcommand("fit", "Fit parameters from physiology");
    auto* stability = app.add_subcommand("stability", "Delay-independent stability report");

    auto* critical = app.add_subcommand("critical", "Hopf critical values");
    std::string kind = "dirac";
    int n = 4, p_count = 1;
    double beta = 3.5;
    critical->add_option("--kind", kind, "dirac|gamma|mixed")
        ->check(CLI::IsMember({"dirac", "gamma", "mixed"}));
    critical->add_option("--n", n, "total Gamma shape");
    critical->add_option("--beta", beta, "Gamma scale (mixed kind), min");
    critical->add_option("--p-max", p_count, "number of delay branches");

    auto* region = app.add_subcommand("region-scan", "Parameter-plane scan");
    std::string scan_kind;
    std::optional<int> scan_n;
    region->add_option("--kind", scan_kind, "dirac|gamma")
        ->check(CLI::IsMember({"dirac", "gamma"}));
    region->add_option("--n", scan_n, "total Gamma shape");

    auto* simulate = app.add_subcommand("simulate", "Integrate the delay system");
    std::string kernels_arg;
    std::optional<double> t_end_opt, step_opt;
    simulate->add_option("--kernels", kernels_arg, "kernel set JSON (inline or file)");
    simulate->add_option("--t-end", t_end_opt, "horizon, min");
    simulate->add_option("--step", step_opt, "step, min");

    auto* simfrac = app.add_subcommand("simulate-frac", "Integrate the fractional system");
    std::optional<double> q_opt, tau1_opt, tau2_opt, tau31_opt, tau32_opt;
    simfrac->add_option("--q", q_opt, "fractional order in (0,1]");
    simfrac->add_option("--tau1", tau1_opt, "CRH transport delay, min");
    simfrac->add_option("--tau2", tau2_opt, "ACTH transport delay, min");
    simfrac->add_option("--tau31", tau31_opt, "CORT->CRH feedback delay, min");
    simfrac->add_option("--tau32", tau32_opt, "CORT->ACTH feedback delay, min");
    simfrac->add_option("--t-end", t_end_opt, "horizon, min");
    simfrac->add_option("--step", step_opt, "step, min");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (alpha)
            cfg.alpha = *alpha, cfg.feedback_present = true;
        if (eta)
            cfg.eta = *eta, cfg.feedback_present = true;
        if (mu)
            cfg.mu = *mu, cfg.feedback_present = true;
        if (c_pg_ml && c_ng_ml)
            throw validation_error("give only one of --c-pg-ml/--c-ng-ml");
        if (c_pg_ml)
            cfg.c = *c_pg_ml, cfg.feedback_present = true;
        if (c_ng_ml)
            cfg.c = 1000.0 * *c_ng_ml, cfg.feedback_present = true;
        if (!params_path.empty()) {
            std::ifstream in(params_path);
            if (!in)
                throw validation_error("cannot open params file " + params_path);
            json pj;
            in >> pj;
            cfg.params = params_from_json(pj);
        }
        if (t_end_opt)
            cfg.t_end = *t_end_opt;
        if (step_opt)
            cfg.step = *step_opt;
        if (q_opt)
            cfg.q = *q_opt;
        if (tau1_opt)
            cfg.delays.tau1 = *tau1_opt, cfg.delays_present = true;
        if (tau2_opt)
            cfg.delays.tau2 = *tau2_opt, cfg.delays_present = true;
        if (tau31_opt)
            cfg.delays.tau31 = *tau31_opt, cfg.delays_present = true;
        if (tau32_opt)
            cfg.delays.tau32 = *tau32_opt, cfg.delays_present = true;
        if (!kernels_arg.empty()) {
            json kj;
            if (fs::exists(kernels_arg)) {
                std::ifstream in(kernels_arg);
                in >> kj;
            } else {
                kj = json::parse(kernels_arg);
            }
            cfg.kernels = kernel_set_from_json(kj);
        }
        if (!scan_kind.empty())
            cfg.scan.kind = kind_from_string(scan_kind);
        if (scan_n)
            cfg.scan.n = *scan_n;

        const Output out{output_dir};
        if (*fit)
            return cmd_fit(cfg, out);
        if (*stability)
            return cmd_stability(cfg, out);
        if (*critical)
            return cmd_critical(cfg, out, kind, n, beta, p_count);
        if (*region)
            return cmd_region_scan(cfg, out, format);
        if (*simulate)
            return cmd_simulate(cfg, out);
        if (*simfrac)
            return cmd_simulate_frac(cfg, out);
        return exit_validation;
    } catch (const validation_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_validation;
    } catch (const no_root_error& ex) {
        std::cerr << "no bifurcation: " << ex.what() << "\n";
        return exit_no_root;
    } catch (const json::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_validation;
    } catch (const std::exception& ex) {
        std::cerr << "solver error: " << ex.what() << "\n";
        return exit_solver;
    }
}

} // namespace hpa::cli
