#include "optotherm/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "optotherm/errors.hpp"

namespace optotherm {

double bose_occupation(double nu, double temperature) {
    if (!(nu > 0.0))
        throw std::domain_error("bose_occupation: nu must be positive");
    if (temperature < 0.0)
        throw std::domain_error("bose_occupation: negative temperature");
    if (temperature == 0.0) return 0.0;
    // expm1 keeps the high-temperature limit T/nu accurate.
    return 1.0 / std::expm1(nu / temperature);
}

double fermi_population(double energy, double temperature) {
    if (temperature < 0.0)
        throw std::domain_error("fermi_population: negative temperature");
    if (temperature == 0.0) {
        if (energy > 0.0) return 0.0;
        if (energy < 0.0) return 1.0;
        return 0.5;
    }
    const double x = energy / temperature;
    // Evaluate with a decaying exponential on both branches.
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

double steady_population(double nbar) {
    if (nbar < 0.0)
        throw std::domain_error("steady_population: negative occupation");
    return nbar / (2.0 * nbar + 1.0);
}

double shannon_entropy_bits(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("shannon_entropy_bits: p outside [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double landauer_bound(double temperature) {
    if (temperature < 0.0)
        throw std::domain_error("landauer_bound: negative temperature");
    return temperature * std::numbers::ln2;
}

double frequency_shift(double gm, std::complex<double> beta) {
    return 2.0 * gm * beta.real();
}

BathRates bath_rates(double nu0, double delta, double temperature, double gamma,
                     int bath_exponent) {
    const double nu = nu0 + delta;
    // NaN must fall through to the integrator's blowup check, not masquerade
    // as a crossing, so the comparison is a strict <= 0.
    if (nu <= 0.0) throw LevelCrossingError(nu);
    if (std::isnan(nu)) {
        BathRates r;
        r.gamma_t = std::numeric_limits<double>::quiet_NaN();
        r.nbar_t = r.gamma_t;
        return r;
    }
    BathRates r;
    r.gamma_t = gamma;
    if (bath_exponent != 0)
        r.gamma_t *= std::pow(nu / nu0, static_cast<double>(bath_exponent));
    r.nbar_t = bose_occupation(nu, temperature);
    return r;
}

}  // namespace optotherm
