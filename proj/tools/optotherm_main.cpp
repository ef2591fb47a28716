#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "optotherm/config.hpp"
#include "optotherm/errors.hpp"
#include "optotherm/kernels.hpp"
#include "optotherm/presets.hpp"
#include "optotherm/protocols.hpp"
#include "optotherm/table.hpp"

namespace {

using nlohmann::json;
using namespace optotherm;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitLevelCrossing = 4;

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string protocol;
    double nu0 = 0, gm = 0, omega = 0, temperature = 0;
    int bath_exponent = 0;
    double beta0 = 0, x_m = 0, p_e = 1, dt = 0, gamma_si = 0;
    int periods = 1, iterations = 100, jobs = 0;
    long samples = 2000;
    std::string otto_mode;
    std::string omega_grid, temperatures, beta0_grid;
    bool si = false;
    std::string out_path, summary_path, point_dir;
};

void add_common_options(CLI::App* cmd, CommonFlags& f, bool sweep) {
    cmd->add_option("--config", f.config_path,
                    "Config file (.json, or a CSV with an embedded header)");
    cmd->add_option("--preset", f.preset, "Named parameter set; see 'presets'");
    cmd->add_option("--protocol", f.protocol, "Protocol to execute");
    cmd->add_option("--nu0", f.nu0, "Bare transition frequency nu0/gamma");
    cmd->add_option("--gm", f.gm, "Optomechanical coupling g_m/gamma");
    cmd->add_option("--omega-over-gamma,--omega", f.omega,
                    "Mechanical frequency Omega/gamma");
    cmd->add_option("--temperature", f.temperature, "Bath temperature k_BT/(hbar gamma)");
    cmd->add_option("--bath-exponent", f.bath_exponent,
                    "Spectral exponent of the emission rate");
    cmd->add_option("--beta0", f.beta0, "Release amplitude |beta(0)|");
    cmd->add_option("--periods", f.periods, "Mechanical periods to integrate");
    cmd->add_option("--iterations", f.iterations, "Engine iterations");
    cmd->add_option("--x-m", f.x_m, "Initial deflection magnitude x_m/x_0");
    cmd->add_option("--p-e", f.p_e, "Pinned TLS population for bath-off strokes");
    cmd->add_option("--otto-mode", f.otto_mode, "branch | meanfield");
    cmd->add_option("--dt", f.dt, "Fixed integration step (0 = automatic)");
    cmd->add_option("--samples", f.samples, "Max samples in time-series output");
    cmd->add_option("--gamma-si", f.gamma_si, "Device gamma in 1/s for SI output");
    cmd->add_flag("--si", f.si, "Append SI-converted columns");
    cmd->add_option("--out,-o", f.out_path, "Output CSV path (default stdout)");
    cmd->add_option("--summary", f.summary_path, "Summary JSON path");
    if (sweep) {
        cmd->add_option("--omega-grid", f.omega_grid,
                        "Sweep axis: JSON array or log:first:last:count");
        cmd->add_option("--temperatures", f.temperatures,
                        "Temperatures for the clausius sweep");
        cmd->add_option("--beta0-grid", f.beta0_grid,
                        "Release amplitudes, one list per temperature");
        cmd->add_option("--jobs", f.jobs,
                        "Concurrent sweep points (default OPTOTHERM_JOBS)");
        cmd->add_option("--point-dir", f.point_dir,
                        "Directory for per-point run files");
    }
}

json grid_value(const std::string& text) {
    // Accept either a JSON array literal or a spec string.
    if (!text.empty() && text.front() == '[') {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("bad grid literal: ") + e.what());
        }
    }
    return text;
}

RunConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
    json doc = json::object();
    if (!f.config_path.empty()) doc = load_config_file(f.config_path).document;

    const auto given = [cmd](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--preset")) {
        // A preset on the command line rebases the document: start from the
        // preset and keep only explicit flag overrides.
        doc = json::object();
        doc["preset"] = f.preset;
    }
    if (given("--protocol")) doc["protocol"] = f.protocol;
    if (given("--nu0")) doc["nu0"] = f.nu0;
    if (given("--gm")) doc["gm"] = f.gm;
    if (given("--omega-over-gamma")) doc["omega"] = f.omega;
    if (given("--temperature")) doc["temperature"] = f.temperature;
    if (given("--bath-exponent")) doc["bath_exponent"] = f.bath_exponent;
    if (given("--beta0")) doc["beta0"] = f.beta0;
    if (given("--periods")) doc["periods"] = f.periods;
    if (given("--iterations")) doc["iterations"] = f.iterations;
    if (given("--x-m")) doc["x_m"] = f.x_m;
    if (given("--p-e")) doc["p_e"] = f.p_e;
    if (given("--otto-mode")) doc["otto_mode"] = f.otto_mode;
    if (given("--dt")) doc["dt"] = f.dt;
    if (given("--samples")) doc["samples"] = f.samples;
    if (given("--gamma-si")) doc["gamma_si"] = f.gamma_si;
    if (given("--si")) doc["si"] = true;
    if (given("--jobs")) doc["jobs"] = f.jobs;
    if (given("--omega-grid")) doc["omega_grid"] = grid_value(f.omega_grid);
    if (given("--temperatures")) doc["temperatures"] = grid_value(f.temperatures);
    if (given("--beta0-grid")) doc["beta0_grid"] = grid_value(f.beta0_grid);
    return config_from_json(doc);
}

int resolve_jobs(const RunConfig& cfg) {
    if (cfg.jobs > 0) return cfg.jobs;
    if (const char* env = std::getenv("OPTOTHERM_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

void emit(const OutputTable& table, const json& summary, const CommonFlags& f,
          double wall_seconds) {
    OutputTable stamped = table;
    stamped.meta.emplace_back("wall_time_s", format_double(wall_seconds));
    if (f.out_path.empty())
        write_csv(stamped, std::cout);
    else
        write_csv_file(stamped, f.out_path);
    if (!f.summary_path.empty()) {
        std::ofstream out(f.summary_path);
        if (!out) throw ConfigError("cannot write '" + f.summary_path + "'");
        out << summary.dump(2) << "\n";
    }
}

int cmd_run(const CLI::App* cmd, const CommonFlags& f) {
    const RunConfig cfg = build_config(cmd, f);
    const auto t0 = std::chrono::steady_clock::now();
    OutputTable table;
    json summary;

    if (cfg.protocol == "isothermal") {
        const RunRecord rec = isothermal_cycle(cfg.params, cfg.beta0, cfg.periods,
                                               cfg.dt, cfg.samples);
        table = run_table(rec, cfg);
        summary = run_summary(rec, cfg);
    } else if (cfg.protocol == "extraction" || cfg.protocol == "erasure") {
        const auto dir = cfg.protocol == "extraction" ? StrokeDirection::extraction
                                                      : StrokeDirection::erasure;
        const HalfSwingResult r =
            isothermal_half_swing(cfg.params, cfg.beta0, dir, cfg.dt, cfg.samples);
        table = run_table(r.record, cfg);
        summary = half_swing_summary(r, cfg);
    } else if (cfg.protocol == "transducer") {
        const TransducerResult r =
            adiabatic_transducer(cfg.params, cfg.x_m, cfg.p_e, cfg.dt, cfg.samples);
        table = run_table(r.record, cfg);
        summary = transducer_summary(r, cfg);
    } else if (cfg.protocol == "otto") {
        const OttoMode mode = cfg.otto_mode == "meanfield" ? OttoMode::mean_field
                                                           : OttoMode::branch_average;
        const OttoResult r =
            otto_cycle(cfg.params, cfg.x_m, cfg.iterations, mode, cfg.dt);
        table = otto_table(r, cfg);
        summary = otto_summary(r, cfg);
    } else {
        throw ConfigError("protocol '" + cfg.protocol +
                          "' is a sweep; use the 'sweep' subcommand");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(table, summary, f, wall);
    return 0;
}

int cmd_sweep(const CLI::App* cmd, const CommonFlags& f) {
    const RunConfig cfg = build_config(cmd, f);
    const int jobs = resolve_jobs(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    SweepResult sw;
    if (cfg.protocol == "reversibility") {
        sw = reversibility_sweep(cfg.params, cfg.beta0, cfg.omega_grid, jobs, cfg.dt);
    } else if (cfg.protocol == "bracketing") {
        sw = bracketing_sweep(cfg.params, cfg.beta0, cfg.omega_grid, jobs, cfg.dt);
    } else if (cfg.protocol == "clausius") {
        sw = clausius_sweep(cfg.params, cfg.temperatures, cfg.beta0_grid, jobs,
                            cfg.dt);
    } else {
        throw ConfigError("protocol '" + cfg.protocol +
                          "' is not a sweep; use the 'run' subcommand");
    }

    OutputTable table = sweep_table(sw, cfg);

    if (!f.point_dir.empty()) {
        // One re-executed record per successful point, written in axis order.
        namespace fs = std::filesystem;
        fs::create_directories(f.point_dir);
        table.meta.emplace_back("point_files", f.point_dir + "/point_<row>.csv");
        for (std::size_t i = 0; i < sw.rows.size(); ++i) {
            if (!sw.row_status[i].empty()) continue;
            RunConfig pcfg = cfg;
            SystemParams pp = cfg.params;
            double pbeta0 = cfg.beta0;
            if (cfg.protocol == "clausius") {
                pp.temperature = sw.at(i, "temperature");
                pbeta0 = sw.at(i, "beta0");
            } else {
                pp.omega = sw.at(i, "omega");
            }
            pcfg.params = pp;
            pcfg.beta0 = pbeta0;
            pcfg.document["omega"] = pp.omega;
            pcfg.document["temperature"] = pp.temperature;
            pcfg.document["beta0"] = pbeta0;
            pcfg.document["protocol"] =
                cfg.protocol == "bracketing" ? "erasure" : "extraction";
            pcfg.protocol = pcfg.document["protocol"].get<std::string>();
            const auto dir = cfg.protocol == "bracketing"
                                 ? StrokeDirection::erasure
                                 : StrokeDirection::extraction;
            const HalfSwingResult r = isothermal_half_swing(
                pp, pbeta0, dir, cfg.dt, std::max(200L, cfg.samples / 4));
            char name[32];
            std::snprintf(name, sizeof name, "point_%04zu.csv", i);
            write_csv_file(run_table(r.record, pcfg),
                           (fs::path(f.point_dir) / name).string());
        }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(table, sweep_summary(sw, cfg), f, wall);
    return 0;
}

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Built-in invariant suite over fixed configurations. Residuals are printed
// so a regression shows up as a number, not just a flag.
std::vector<VerifyCheck> run_verify(double dt_override, unsigned seed) {
    std::vector<VerifyCheck> checks;
    char buf[160];

    {
        VerifyCheck c{"fixed-point identity steady(bose) == fermi", false, ""};
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double ratio = std::pow(10.0, -3.0 + 6.0 * i / 200.0);
            const double diff = std::abs(steady_population(bose_occupation(ratio, 1.0)) -
                                         fermi_population(ratio, 1.0));
            worst = std::max(worst, diff);
        }
        c.pass = worst < 1e-12;
        std::snprintf(buf, sizeof buf, "max |diff| = %.3e (tol 1e-12)", worst);
        c.detail = buf;
        checks.push_back(c);
    }
    {
        VerifyCheck c{"reversible work closed form == quadrature", false, ""};
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-8.0, 8.0);
        std::uniform_real_distribution<double> logT(-1.0, 3.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double T = std::pow(10.0, logT(rng));
            double ei = T * u(rng), ef = T * u(rng);
            if (std::abs(ei - ef) < 0.1 * T) ef = ei + (ef >= ei ? 1.0 : -1.0) * 0.1 * T;
            const double a = reversible_isothermal_work(ei, ef, T);
            const double b = reversible_isothermal_work_quadrature(ei, ef, T);
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
        }
        c.pass = worst < 1e-8;
        std::snprintf(buf, sizeof buf, "max rel diff = %.3e (tol 1e-8)", worst);
        c.detail = buf;
        checks.push_back(c);
    }
    {
        VerifyCheck c{"first law and conservation on a reference run", false, ""};
        SystemParams p;
        p.nu0 = 1e4;
        p.gm = 0.1;
        p.omega = 1e-3;
        p.temperature = 1000.0;
        try {
            MeanFieldState s = MeanFieldState::coherent(500.0, 0.0);
            s.p_e = fermi_population(p.nu0 + frequency_shift(p.gm, s.beta),
                                     p.temperature);
            const double n0 = s.n_phonon;
            const double inv0 = s.n_phonon - std::norm(s.beta);
            EnergyLedger led = make_ledger(s, p);
            SegmentSpec seg;
            seg.duration = 2000.0;
            seg.dt = dt_override;
            double worst_cons = 0.0, worst_first = 0.0, worst_batt = 0.0;
            seg.sample_every = 200;
            const StepObserver obs = [&](double, const MeanFieldState& st,
                                         const EnergyLedger& l) {
                worst_cons = std::max(
                    worst_cons, std::abs((st.n_phonon - std::norm(st.beta)) - inv0));
                const double scale =
                    std::max({std::abs(l.work), std::abs(l.heat), p.omega * n0});
                worst_first =
                    std::max(worst_first, std::abs(first_law_residual(l)) / scale);
                worst_batt = std::max(
                    worst_batt, std::abs(battery_residual(l)) /
                                    std::max(std::abs(l.work), p.omega));
            };
            evolve_segment(s, p, seg, led, obs);
            c.pass = worst_cons < 1e-8 * std::max(1.0, n0) && worst_first < 1e-6 &&
                     worst_batt < 1e-8;
            std::snprintf(buf, sizeof buf,
                          "conservation %.3e, first-law rel %.3e, battery rel %.3e",
                          worst_cons, worst_first, worst_batt);
            c.detail = buf;
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("run failed: ") + e.what();
        }
        checks.push_back(c);
    }
    {
        VerifyCheck c{"decoupled system does no work (g_m = 0)", false, ""};
        SystemParams p;
        p.nu0 = 10.0;
        p.gm = 0.0;
        p.omega = 0.5;
        p.temperature = 5.0;
        MeanFieldState s = MeanFieldState::coherent({3.0, 1.0}, 0.2);
        EnergyLedger led = make_ledger(s, p);
        SegmentSpec seg;
        seg.duration = 50.0;
        seg.dt = dt_override;
        evolve_segment(s, p, seg, led);
        c.pass = led.work == 0.0;
        std::snprintf(buf, sizeof buf, "accumulated work = %.3e (must be exactly 0)",
                      led.work);
        c.detail = buf;
        checks.push_back(c);
    }
    {
        VerifyCheck c{"adiabatic stroke matches closed forms", false, ""};
        SystemParams p;
        p.nu0 = 1e4;
        p.gm = 0.1;
        p.omega = 1e-3;
        p.temperature = 0.0;
        try {
            const TransducerResult r =
                adiabatic_transducer(p, 50.0, 1.0, dt_override);
            const double x_err =
                std::abs(r.x_turn - adiabatic_turning_point(p.gm, p.omega, 1.0, 50.0));
            const double w_ref = adiabatic_stroke_work(p.gm, p.omega, 50.0);
            const double w_err = std::abs(r.work_extracted - w_ref) / w_ref;
            c.pass = x_err < 1e-6 && w_err < 1e-6;
            std::snprintf(buf, sizeof buf,
                          "turning point abs err %.3e, work rel err %.3e", x_err, w_err);
            c.detail = buf;
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("run failed: ") + e.what();
        }
        checks.push_back(c);
    }
    return checks;
}

int cmd_verify(double dt_override, unsigned seed) {
    const auto checks = run_verify(dt_override, seed);
    bool all = true;
    for (const auto& c : checks) {
        std::printf("[%s] %s: %s\n", c.pass ? " ok " : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        all = all && c.pass;
    }
    std::printf("%zu/%zu checks passed\n",
                static_cast<std::size_t>(
                    std::count_if(checks.begin(), checks.end(),
                                  [](const VerifyCheck& c) { return c.pass; })),
                checks.size());
    return all ? 0 : kExitFailure;
}

int cmd_presets(const std::string& name) {
    if (name.empty()) {
        for (const auto& n : preset_names()) {
            const json cfg = preset_config(n);
            std::printf("%-12s protocol=%-13s nu0=%-9g gm=%-9g omega=%-10g T=%g\n",
                        n.c_str(), cfg.at("protocol").get<std::string>().c_str(),
                        cfg.at("nu0").get<double>(), cfg.at("gm").get<double>(),
                        cfg.at("omega").get<double>(),
                        cfg.at("temperature").get<double>());
        }
        return 0;
    }
    std::printf("%s\n", preset_config(name).dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical thermodynamics of a TLS-mechanical-oscillator "
                 "device: cycles, engines and erasure strokes"};
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags;
    CLI::App* run = app.add_subcommand("run", "Execute one protocol");
    add_common_options(run, run_flags, false);
    CLI::App* sweep = app.add_subcommand("sweep", "Execute a protocol over a grid");
    add_common_options(sweep, sweep_flags, true);

    double verify_dt = 0.0;
    unsigned verify_seed = 20260823;
    CLI::App* verify = app.add_subcommand("verify", "Run the built-in invariant suite");
    verify->add_option("--dt", verify_dt, "Step override for the dynamical checks");
    verify->add_option("--seed", verify_seed, "Seed for randomized checks");

    std::string preset_name;
    CLI::App* presets = app.add_subcommand("presets", "List or show named presets");
    presets->add_option("name", preset_name, "Preset to print as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run, run_flags);
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_flags);
        if (verify->parsed()) return cmd_verify(verify_dt, verify_seed);
        if (presets->parsed()) return cmd_presets(preset_name);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const IntegrationBlowupError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBlowup;
    } catch (const LevelCrossingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitLevelCrossing;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return 0;
}
