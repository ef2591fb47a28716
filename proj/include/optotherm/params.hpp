#pragma once

#include <string>
#include <vector>

namespace optotherm {

inline constexpr double kHbarSi = 1.054571817e-34;      // J s
inline constexpr double kBoltzmannSi = 1.380649e-23;    // J / K

// Device parameters in internal units: hbar = k_B = 1 and the spontaneous
// emission rate gamma is the frequency unit. All frequencies are angular.
struct SystemParams {
    double nu0 = 0.0;          // bare TLS transition frequency
    double gm = 0.0;           // optomechanical coupling
    double omega = 0.0;        // mechanical frequency
    double gamma = 1.0;        // spontaneous emission rate, fixed at 1
    double temperature = 0.0;  // bath temperature k_B T in units of hbar gamma
    int bath_exponent = 0;     // spectral scaling of the emission rate

    void validate() const;  // throws ConfigError on out-of-domain values

    // Hierarchy checks behind the mean-field treatment. Violations degrade
    // accuracy gradually, so they warn instead of failing validation.
    bool dispersive() const;     // nu0 >> |g_m| and |g_m| >= omega
    bool semiclassical() const;  // gamma >> |g_m|
    std::vector<std::string> regime_warnings() const;
};

// Step small against every rate in the problem: thermalization at the bare
// frequency, the mechanical frequency and the coupling.
double default_timestep(const SystemParams& p);

// Rest position of the MO when the TLS holds population p_e, in units of the
// zero-point length: -2 g_m p_e / omega.
double displaced_rest_position(double gm, double omega, double p_e = 1.0);

// Maps internal quantities onto one concrete device, fixed by its real
// spontaneous emission rate gamma_si in 1/s.
struct UnitConversion {
    double gamma_si = 1.0;

    double seconds(double t) const;
    double radians_per_second(double freq) const;
    double joules(double energy) const;
    double watts(double power) const;
    double kelvin(double temperature) const;

    double from_seconds(double t_si) const;
    double from_radians_per_second(double freq_si) const;
    double from_joules(double energy_si) const;
    double from_watts(double power_si) const;
    double from_kelvin(double temperature_si) const;
};

}  // namespace optotherm
