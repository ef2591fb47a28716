#include "optotherm/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "optotherm/errors.hpp"
#include "optotherm/kernels.hpp"

namespace optotherm {

void SystemParams::validate() const {
    if (!std::isfinite(nu0) || nu0 <= 0.0)
        throw ConfigError("nu0 must be finite and positive");
    if (!std::isfinite(gm))
        throw ConfigError("gm must be finite");
    if (!std::isfinite(omega) || omega <= 0.0)
        throw ConfigError("omega must be finite and positive");
    if (gamma != 1.0)
        throw ConfigError("gamma is the internal frequency unit and must be 1");
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw ConfigError("temperature must be finite and non-negative");
    if (std::abs(bath_exponent) > 8)
        throw ConfigError("bath_exponent outside [-8, 8]");
}

bool SystemParams::dispersive() const {
    return nu0 >= 100.0 * std::abs(gm) && std::abs(gm) >= omega;
}

bool SystemParams::semiclassical() const {
    return gamma >= 10.0 * std::abs(gm);
}

std::vector<std::string> SystemParams::regime_warnings() const {
    std::vector<std::string> w;
    if (!dispersive())
        w.push_back("dispersive hierarchy nu0 >> g_m >= omega not satisfied; "
                    "the frequency-shift picture loses accuracy");
    if (!semiclassical())
        w.push_back("gamma >> g_m not satisfied; mean-field factorization "
                    "neglects TLS-MO correlations that may matter here");
    return w;
}

double default_timestep(const SystemParams& p) {
    const double thermal_rate =
        p.gamma * (2.0 * bose_occupation(p.nu0, p.temperature) + 1.0);
    const double fastest = std::max({thermal_rate, p.omega, std::abs(p.gm)});
    return 1e-2 / fastest;
}

double displaced_rest_position(double gm, double omega, double p_e) {
    if (omega <= 0.0)
        throw std::domain_error("displaced_rest_position: omega must be positive");
    return -2.0 * gm * p_e / omega;
}

double UnitConversion::seconds(double t) const { return t / gamma_si; }
double UnitConversion::radians_per_second(double freq) const { return freq * gamma_si; }
double UnitConversion::joules(double energy) const { return energy * kHbarSi * gamma_si; }
double UnitConversion::watts(double power) const { return power * kHbarSi * gamma_si * gamma_si; }
double UnitConversion::kelvin(double temperature) const {
    return temperature * kHbarSi * gamma_si / kBoltzmannSi;
}

double UnitConversion::from_seconds(double t_si) const { return t_si * gamma_si; }
double UnitConversion::from_radians_per_second(double freq_si) const { return freq_si / gamma_si; }
double UnitConversion::from_joules(double energy_si) const { return energy_si / (kHbarSi * gamma_si); }
double UnitConversion::from_watts(double power_si) const { return power_si / (kHbarSi * gamma_si * gamma_si); }
double UnitConversion::from_kelvin(double temperature_si) const {
    return temperature_si * kBoltzmannSi / (kHbarSi * gamma_si);
}

}  // namespace optotherm
