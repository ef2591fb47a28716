#include "optotherm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "optotherm/errors.hpp"
#include "optotherm/presets.hpp"

namespace optotherm {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "preset",     "protocol",    "nu0",        "gm",
        "omega",      "gamma",       "temperature", "bath_exponent",
        "beta0",      "periods",     "iterations", "x_m",
        "p_e",        "otto_mode",   "omega_grid", "temperatures",
        "beta0_grid", "dt",          "samples",    "gamma_si",
        "si",         "jobs",
    };
    return keys;
}

const std::set<std::string>& known_protocols() {
    static const std::set<std::string> protocols = {
        "isothermal", "extraction",    "erasure",    "transducer",
        "otto",       "reversibility", "bracketing", "clausius",
    };
    return protocols;
}

double require_number(const json& doc, const std::string& key) {
    if (!doc.contains(key))
        throw ConfigError("missing required key '" + key + "'");
    if (!doc.at(key).is_number())
        throw ConfigError("key '" + key + "' must be a number");
    return doc.at(key).get<double>();
}

double number_or(const json& doc, const std::string& key, double fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_number())
        throw ConfigError("key '" + key + "' must be a number");
    return doc.at(key).get<double>();
}

}  // namespace

std::vector<double> parse_grid_spec(const json& spec) {
    if (spec.is_array()) {
        std::vector<double> v;
        for (const auto& x : spec) {
            if (!x.is_number()) throw ConfigError("grid array entries must be numbers");
            v.push_back(x.get<double>());
        }
        if (v.empty()) throw ConfigError("grid must not be empty");
        return v;
    }
    if (!spec.is_string())
        throw ConfigError("grid must be an array or 'log:first:last:count'");

    const std::string s = spec.get<std::string>();
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin"))
        throw ConfigError("grid spec '" + s + "' is not log:first:last:count "
                          "or lin:first:last:count");

    double first, last;
    long count;
    try {
        first = std::stod(parts[1]);
        last = std::stod(parts[2]);
        count = std::stol(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("grid spec '" + s + "' has non-numeric fields");
    }
    if (count < 1) throw ConfigError("grid count must be >= 1");
    if (parts[0] == "log" && (first <= 0.0 || last <= 0.0))
        throw ConfigError("log grid endpoints must be positive");

    std::vector<double> v(count);
    if (count == 1) {
        v[0] = first;
        return v;
    }
    if (parts[0] == "lin") {
        const double step = (last - first) / (count - 1);
        for (long i = 0; i < count; ++i) v[i] = first + step * i;
    } else {
        const double la = std::log10(first), lb = std::log10(last);
        const double step = (lb - la) / (count - 1);
        for (long i = 0; i < count; ++i) v[i] = std::pow(10.0, la + step * i);
    }
    v.back() = last;  // pin the endpoint against rounding
    return v;
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!known_keys().count(key))
            throw ConfigError("unknown config key '" + key + "'");

    json merged;
    if (doc.contains("preset")) {
        if (!doc.at("preset").is_string())
            throw ConfigError("preset must be a string");
        merged = preset_config(doc.at("preset").get<std::string>());
    } else {
        for (const char* key : {"nu0", "gm", "omega", "temperature"})
            if (!doc.contains(key))
                throw ConfigError(std::string("explicit config requires '") + key +
                                  "' (or use a preset)");
    }
    for (const auto& [key, value] : doc.items()) merged[key] = value;

    RunConfig cfg;
    cfg.document = merged;
    if (merged.contains("preset")) cfg.preset = merged.at("preset").get<std::string>();

    if (!merged.contains("protocol") || !merged.at("protocol").is_string())
        throw ConfigError("missing 'protocol'");
    cfg.protocol = merged.at("protocol").get<std::string>();
    if (!known_protocols().count(cfg.protocol)) {
        std::string all;
        for (const auto& x : known_protocols()) all += (all.empty() ? "" : ", ") + x;
        throw ConfigError("unknown protocol '" + cfg.protocol + "'; one of: " + all);
    }

    cfg.params.nu0 = require_number(merged, "nu0");
    cfg.params.gm = require_number(merged, "gm");
    cfg.params.omega = require_number(merged, "omega");
    cfg.params.temperature = require_number(merged, "temperature");
    cfg.params.gamma = number_or(merged, "gamma", 1.0);
    cfg.params.bath_exponent =
        static_cast<int>(number_or(merged, "bath_exponent", 0.0));
    cfg.params.validate();

    cfg.beta0 = number_or(merged, "beta0", 0.0);
    cfg.periods = static_cast<int>(number_or(merged, "periods", 1.0));
    cfg.iterations = static_cast<int>(number_or(merged, "iterations", 100.0));
    cfg.x_m = number_or(merged, "x_m", 0.0);
    cfg.p_e = number_or(merged, "p_e", 1.0);
    cfg.dt = number_or(merged, "dt", 0.0);
    cfg.samples = static_cast<long>(number_or(merged, "samples", 2000.0));
    cfg.gamma_si = number_or(merged, "gamma_si", 0.0);
    cfg.jobs = static_cast<int>(number_or(merged, "jobs", 0.0));
    if (merged.contains("si")) {
        if (!merged.at("si").is_boolean()) throw ConfigError("'si' must be a boolean");
        cfg.si = merged.at("si").get<bool>();
    }
    if (merged.contains("otto_mode")) {
        cfg.otto_mode = merged.at("otto_mode").get<std::string>();
        if (cfg.otto_mode != "branch" && cfg.otto_mode != "meanfield")
            throw ConfigError("otto_mode must be 'branch' or 'meanfield'");
    }

    if (merged.contains("omega_grid"))
        cfg.omega_grid = parse_grid_spec(merged.at("omega_grid"));
    if (merged.contains("temperatures"))
        cfg.temperatures = parse_grid_spec(merged.at("temperatures"));
    if (merged.contains("beta0_grid")) {
        const json& bg = merged.at("beta0_grid");
        if (bg.is_array() && !bg.empty() && bg.front().is_array()) {
            for (const auto& sub : bg) cfg.beta0_grid.push_back(parse_grid_spec(sub));
        } else {
            cfg.beta0_grid.push_back(parse_grid_spec(bg));
        }
    }

    if (cfg.dt < 0.0) throw ConfigError("dt must be >= 0");
    if (cfg.samples < 0) throw ConfigError("samples must be >= 0");
    if (cfg.jobs < 0) throw ConfigError("jobs must be >= 0");
    if (cfg.si && cfg.gamma_si <= 0.0)
        throw ConfigError("SI output requires gamma_si > 0");

    const bool needs_beta0 = cfg.protocol == "isothermal" ||
                             cfg.protocol == "extraction" ||
                             cfg.protocol == "erasure" ||
                             cfg.protocol == "reversibility" ||
                             cfg.protocol == "bracketing";
    if (needs_beta0 && !(cfg.beta0 > 0.0))
        throw ConfigError("protocol '" + cfg.protocol + "' requires beta0 > 0");
    if ((cfg.protocol == "reversibility" || cfg.protocol == "bracketing") &&
        cfg.omega_grid.empty())
        throw ConfigError("protocol '" + cfg.protocol + "' requires omega_grid");
    if (cfg.protocol == "clausius") {
        if (cfg.temperatures.empty() || cfg.beta0_grid.empty())
            throw ConfigError("protocol 'clausius' requires temperatures and beta0_grid");
        if (cfg.beta0_grid.size() == 1 && cfg.temperatures.size() > 1)
            cfg.beta0_grid.assign(cfg.temperatures.size(), cfg.beta0_grid.front());
        if (cfg.beta0_grid.size() != cfg.temperatures.size())
            throw ConfigError("need one beta0 grid per temperature");
    }
    if (cfg.protocol == "isothermal" && cfg.periods < 1)
        throw ConfigError("periods must be >= 1");
    if (cfg.protocol == "otto" && cfg.iterations < 1)
        throw ConfigError("iterations must be >= 1");
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        json doc;
        try {
            in >> doc;
        } catch (const json::parse_error& e) {
            throw ConfigError("bad JSON in '" + path + "': " + e.what());
        }
        return config_from_json(doc);
    }

    // Anything else: look for the embedded '# config: {...}' header.
    std::string line;
    const std::string tag = "# config: ";
    while (std::getline(in, line)) {
        if (line.compare(0, tag.size(), tag) == 0) {
            try {
                return config_from_json(json::parse(line.substr(tag.size())));
            } catch (const json::parse_error& e) {
                throw ConfigError("bad embedded config in '" + path + "': " + e.what());
            }
        }
        if (!line.empty() && line[0] != '#') break;
    }
    throw ConfigError("no config found in '" + path +
                      "' (expected .json or a '# config:' header line)");
}

std::string canonical_config_string(const RunConfig& cfg) {
    // nlohmann objects iterate in sorted key order, so dump() is canonical.
    return cfg.document.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string s = canonical_config_string(cfg);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace optotherm
