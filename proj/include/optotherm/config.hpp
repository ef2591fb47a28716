#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "optotherm/params.hpp"

namespace optotherm {

// One declarative run/sweep description. Built by merging (in order of
// precedence) CLI flag overrides over a config file over a preset; the base
// parameters must come either from a preset or from a complete explicit set.
struct RunConfig {
    std::string preset;    // empty when fully explicit
    std::string protocol;  // isothermal | extraction | erasure | transducer |
                           // otto | reversibility | bracketing | clausius
    SystemParams params;

    double beta0 = 0.0;
    int periods = 1;
    int iterations = 100;
    double x_m = 0.0;
    double p_e = 1.0;
    std::string otto_mode = "branch";  // branch | meanfield

    std::vector<double> omega_grid;
    std::vector<double> temperatures;
    std::vector<std::vector<double>> beta0_grid;

    double dt = 0.0;       // 0 = default step rule
    long samples = 2000;   // sample cap for time-series output
    double gamma_si = 0.0; // 0 = no device calibration
    bool si = false;
    int jobs = 0;          // 0 = OPTOTHERM_JOBS env var, else 1

    nlohmann::json document;  // the merged config, embedded in outputs
};

// Grid syntax: JSON array of numbers, or "log:first:last:count" /
// "lin:first:last:count".
std::vector<double> parse_grid_spec(const nlohmann::json& spec);

// Merges preset + overrides and validates. Unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& doc);

// Reads a config from a .json file or from the '# config:' header line of a
// previously written CSV, enabling re-execution of any output.
RunConfig load_config_file(const std::string& path);

// The merged document with sorted keys on one line; identical configs give
// identical strings.
std::string canonical_config_string(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace optotherm
