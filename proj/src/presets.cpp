#include "optotherm/presets.hpp"

#include "optotherm/errors.hpp"

namespace optotherm {

namespace {

using nlohmann::json;

// Caption-level parameter sets. fig3d is semiclassically marginal
// (g_m >> gamma); it runs as configured and carries the regime warning.
// Release amplitudes there are capped per temperature so the swing never
// drives the transition frequency through zero.
json build_presets() {
    json all;
    all["fig3a"] = {
        {"protocol", "isothermal"}, {"nu0", 1e4},    {"gm", 0.1},
        {"omega", 1e-3},            {"temperature", 1000.0},
        {"beta0", 1000.0},          {"periods", 1},
    };
    all["fig3b"] = {
        {"protocol", "bracketing"},
        {"nu0", 1e4},
        {"gm", 0.1},
        {"omega", 1e-3},
        {"temperature", 1000.0},
        {"beta0", 1000.0},
        {"omega_grid", {1e-3, 1e-2, 1e-1, 1.0}},
    };
    all["fig3c"] = {
        {"protocol", "reversibility"},
        {"nu0", 1e4},
        {"gm", 0.1},
        {"omega", 1e-3},
        {"temperature", 1000.0},
        {"beta0", 1000.0},
        {"omega_grid", "log:1e-3:1:20"},
    };
    all["fig3d"] = {
        {"protocol", "clausius"},
        {"nu0", 5000.0},
        {"gm", 20.0},
        {"omega", 1e-3},
        {"temperature", 250.0},
        {"temperatures", {125.0, 250.0, 500.0}},
        {"beta0_grid",
         {{30.0, 45.0, 60.0, 75.0, 90.0, 100.0},
          {20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0},
          {10.0, 14.0, 18.0, 22.0, 26.0, 30.0}}},
    };
    all["otto"] = {
        {"protocol", "otto"}, {"nu0", 1e4},  {"gm", 0.1},
        {"omega", 1e-3},      {"temperature", 0.0},
        {"x_m", 0.0},         {"iterations", 100},
        {"otto_mode", "branch"},
    };
    // Diamond-defect device scale: gamma_si = 1e9 1/s, mechanical mode at
    // 530 kHz, coupling 450 kHz, optical transition at 1.35 eV.
    all["otto-yeo"] = {
        {"protocol", "otto"},
        {"nu0", 2.0510073e6},
        {"gm", 2.827433388230814e-3},
        {"omega", 3.3300882127565458e-3},
        {"temperature", 0.0},
        {"x_m", 0.0},
        {"iterations", 100},
        {"otto_mode", "branch"},
        {"gamma_si", 1e9},
    };
    all["transducer"] = {
        {"protocol", "transducer"}, {"nu0", 1e4}, {"gm", 0.1},
        {"omega", 1e-3},            {"temperature", 0.0},
        {"x_m", 50.0},              {"p_e", 1.0},
    };
    return all;
}

const json& all_presets() {
    static const json presets = build_presets();
    return presets;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [key, value] : all_presets().items()) n.push_back(key);
        return n;
    }();
    return names;
}

bool is_preset(std::string_view name) {
    return all_presets().contains(std::string(name));
}

nlohmann::json preset_config(std::string_view name) {
    if (!is_preset(name))
        throw ConfigError("unknown preset '" + std::string(name) +
                          "'; available: " + [] {
                              std::string s;
                              for (const auto& n : preset_names())
                                  s += (s.empty() ? "" : ", ") + n;
                              return s;
                          }());
    return all_presets().at(std::string(name));
}

}  // namespace optotherm
