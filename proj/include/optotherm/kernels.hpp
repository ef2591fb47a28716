#pragma once

#include <complex>

namespace optotherm {

// Thermal occupation of a bath mode at angular frequency nu > 0.
// Internal units throughout: hbar = k_B = 1. T = 0 gives exactly 0.
double bose_occupation(double nu, double temperature);

// Equilibrium excited-state population of a two-level system with the given
// gap. T = 0 degenerates to a step: 1 below zero gap, 1/2 at zero, 0 above.
double fermi_population(double energy, double temperature);

// Stationary excited population of the damped TLS, nbar / (2 nbar + 1).
// Composing with bose_occupation reproduces fermi_population identically.
double steady_population(double nbar);

// Binary Shannon entropy in bits. p outside [0, 1] is a domain error.
double shannon_entropy_bits(double p);

// k_B T ln 2, the minimum work to erase one bit at temperature T.
double landauer_bound(double temperature);

// Dispersive pull of the TLS transition by the MO deflection, 2 g_m Re(beta).
double frequency_shift(double gm, std::complex<double> beta);

struct BathRates {
    double gamma_t = 0.0;  // emission rate at the shifted frequency
    double nbar_t = 0.0;   // bath occupation at the shifted frequency
};

// Bath coupling evaluated at the instantaneous gap nu0 + delta. bath_exponent
// sets the spectral scaling gamma_t = gamma ((nu0 + delta) / nu0)^p; the
// default p = 0 keeps the rate flat. Throws LevelCrossingError when
// nu0 + delta <= 0.
BathRates bath_rates(double nu0, double delta, double temperature, double gamma,
                     int bath_exponent);

}  // namespace optotherm
