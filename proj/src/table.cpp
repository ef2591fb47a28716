#include "optotherm/table.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "optotherm/errors.hpp"
#include "optotherm/kernels.hpp"

namespace optotherm {

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void base_meta(OutputTable& t, const RunConfig& cfg) {
    t.meta.emplace_back("version", kArtifactVersion);
    t.meta.emplace_back("config", canonical_config_string(cfg));
    t.meta.emplace_back("params_hash", hash_hex(config_hash(cfg)));
}

// Status text goes into a CSV cell; keep the row parseable.
std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const OutputTable& t, std::ostream& os) {
    for (const auto& [key, value] : t.meta) os << "# " << key << ": " << value << "\n";
    const bool with_status = !t.row_status.empty();
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    if (with_status) os << (t.columns.empty() ? "" : ",") << "status";
    os << "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_double(row[c]);
        if (with_status)
            os << (row.empty() ? "" : ",")
               << (r < t.row_status.size() && !t.row_status[r].empty()
                       ? sanitize(t.row_status[r])
                       : "ok");
        os << "\n";
    }
}

void write_csv_file(const OutputTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_csv(t, out);
}

OutputTable read_csv(std::istream& is) {
    OutputTable t;
    std::string line;
    bool header_done = false;
    bool has_status = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            const auto colon = body.find(": ");
            if (colon == std::string::npos)
                t.meta.emplace_back(body, "");
            else
                t.meta.emplace_back(body.substr(0, colon), body.substr(colon + 2));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_done) {
            header_done = true;
            if (!cells.empty() && cells.back() == "status") {
                has_status = true;
                cells.pop_back();
            }
            t.columns = cells;
            continue;
        }
        std::vector<double> row;
        const std::size_t ncols = t.columns.size();
        for (std::size_t c = 0; c < cells.size() && c < ncols; ++c) {
            char* end = nullptr;
            row.push_back(std::strtod(cells[c].c_str(), &end));
        }
        t.rows.push_back(std::move(row));
        if (has_status)
            t.row_status.push_back(cells.size() > ncols && cells[ncols] != "ok"
                                       ? cells[ncols]
                                       : "");
    }
    return t;
}

OutputTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_csv(in);
}

OutputTable run_table(const RunRecord& rec, const RunConfig& cfg) {
    OutputTable t;
    base_meta(t, cfg);
    t.meta.emplace_back("protocol", rec.protocol);
    t.meta.emplace_back("dt", format_double(rec.dt));
    for (const auto& w : rec.warnings) t.meta.emplace_back("warning", w);

    t.columns = {"t",        "re_beta",   "im_beta", "n_phonon",
                 "p_e",      "re_s",      "im_s",    "deflection",
                 "delta",    "work",      "heat",    "reset_energy",
                 "u",        "e_mech",    "entropy_bits"};
    const bool si = cfg.si && cfg.gamma_si > 0.0;
    UnitConversion conv{cfg.gamma_si > 0.0 ? cfg.gamma_si : 1.0};
    if (si)
        for (const char* extra : {"t_s", "work_J", "heat_J", "u_J", "e_mech_J"})
            t.columns.push_back(extra);

    for (const RunSample& s : rec.samples) {
        std::vector<double> row = {
            s.t,
            s.state.beta.real(),
            s.state.beta.imag(),
            s.state.n_phonon,
            s.state.p_e,
            s.state.s_rot.real(),
            s.state.s_rot.imag(),
            s.state.deflection(),
            s.delta,
            s.work,
            s.heat,
            s.reset_energy,
            s.u,
            s.e_mech,
            s.entropy_bits,
        };
        if (si) {
            row.push_back(conv.seconds(s.t));
            row.push_back(conv.joules(s.work));
            row.push_back(conv.joules(s.heat));
            row.push_back(conv.joules(s.u));
            row.push_back(conv.joules(s.e_mech));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

OutputTable otto_table(const OttoResult& otto, const RunConfig& cfg) {
    OutputTable t;
    base_meta(t, cfg);
    t.meta.emplace_back("protocol", "otto");
    t.meta.emplace_back("otto_mode", otto.mode == OttoMode::branch_average
                                         ? "branch"
                                         : "meanfield");

    t.columns = {"n", "work_extracted", "work_cumulative", "amplitude_start",
                 "amplitude_end"};
    const bool si = cfg.gamma_si > 0.0;
    std::vector<double> power;
    if (si) {
        t.columns.push_back("power_W");
        power = engine_power_watts(otto, cfg.params, UnitConversion{cfg.gamma_si});
    }
    for (std::size_t i = 0; i < otto.iterations.size(); ++i) {
        const OttoIteration& it = otto.iterations[i];
        std::vector<double> row = {static_cast<double>(it.n), it.work_extracted,
                                   it.work_cumulative, it.amplitude_start,
                                   it.amplitude_end};
        if (si) row.push_back(power[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

OutputTable sweep_table(const SweepResult& sw, const RunConfig& cfg) {
    OutputTable t;
    base_meta(t, cfg);
    t.meta.emplace_back("protocol", cfg.protocol);
    for (const auto& w : cfg.params.regime_warnings())
        t.meta.emplace_back("warning", w);
    for (const auto& [key, value] : sw.summary)
        t.meta.emplace_back("summary." + key, format_double(value));
    t.columns = sw.columns;
    t.rows = sw.rows;
    t.row_status = sw.row_status;
    return t;
}

namespace {

nlohmann::json ledger_json(const EnergyLedger& led) {
    return {
        {"work", led.work},
        {"heat", led.heat},
        {"reset_energy", led.reset_energy},
        {"u", led.u},
        {"u0", led.u0},
        {"e_mech", led.e_mech},
        {"e_mech0", led.e_mech0},
        {"entropy_bits", led.entropy_bits},
        {"first_law_residual", first_law_residual(led)},
        {"battery_residual", battery_residual(led)},
        {"max_first_law_residual", led.max_first_law_residual},
    };
}

nlohmann::json summary_base(const RunConfig& cfg) {
    return {
        {"version", kArtifactVersion},
        {"config", cfg.document},
        {"params_hash", hash_hex(config_hash(cfg))},
    };
}

}  // namespace

nlohmann::json run_summary(const RunRecord& rec, const RunConfig& cfg) {
    nlohmann::json j = summary_base(cfg);
    j["protocol"] = rec.protocol;
    j["t_final"] = rec.t_final;
    j["dt"] = rec.dt;
    j["ledger"] = ledger_json(rec.ledger);
    j["final_state"] = {
        {"re_beta", rec.final_state.beta.real()},
        {"im_beta", rec.final_state.beta.imag()},
        {"n_phonon", rec.final_state.n_phonon},
        {"p_e", rec.final_state.p_e},
    };
    j["warnings"] = rec.warnings;
    return j;
}

nlohmann::json half_swing_summary(const HalfSwingResult& r, const RunConfig& cfg) {
    nlohmann::json j = run_summary(r.record, cfg);
    j["t_star"] = r.t_star;
    j["energy_initial"] = r.energy_initial;
    j["energy_final"] = r.energy_final;
    j["entropy_initial_bits"] = r.entropy_initial_bits;
    j["entropy_final_bits"] = r.entropy_final_bits;
    j["work"] = r.work;
    j["heat"] = r.heat;
    j["work_reversible"] = reversible_isothermal_work(
        r.energy_initial, r.energy_final, cfg.params.temperature);
    return j;
}

nlohmann::json transducer_summary(const TransducerResult& r, const RunConfig& cfg) {
    nlohmann::json j = run_summary(r.record, cfg);
    j["work_extracted"] = r.work_extracted;
    j["x_start"] = r.x_start;
    j["x_turn"] = r.x_turn;
    j["delta_at_turn"] = r.delta_at_turn;
    j["t_turn"] = r.t_turn;
    return j;
}

nlohmann::json otto_summary(const OttoResult& otto, const RunConfig& cfg) {
    nlohmann::json j = summary_base(cfg);
    j["protocol"] = "otto";
    j["otto_mode"] =
        otto.mode == OttoMode::branch_average ? "branch" : "meanfield";
    j["iterations"] = otto.iterations.size();
    j["total_work"] = otto.total_work;
    if (!otto.iterations.empty()) {
        j["first_work"] = otto.iterations.front().work_extracted;
        j["last_work"] = otto.iterations.back().work_extracted;
        j["final_amplitude"] = otto.iterations.back().amplitude_end;
    }
    return j;
}

nlohmann::json sweep_summary(const SweepResult& sw, const RunConfig& cfg) {
    nlohmann::json j = summary_base(cfg);
    j["protocol"] = cfg.protocol;
    j["points"] = sw.rows.size();
    std::size_t failed = 0;
    for (const auto& s : sw.row_status)
        if (!s.empty()) ++failed;
    j["failed_points"] = failed;
    nlohmann::json summ = nlohmann::json::object();
    for (const auto& [key, value] : sw.summary) summ[key] = value;
    j["summary"] = summ;
    return j;
}

}  // namespace optotherm
