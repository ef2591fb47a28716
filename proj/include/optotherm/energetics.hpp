#pragma once

#include "optotherm/dynamics.hpp"
#include "optotherm/params.hpp"

namespace optotherm {

// Tolerance on the first-law residual relative to the running energy scale.
// The ledger throws when the residual exceeds 100x this bound.
inline constexpr double kFirstLawRelTol = 1e-6;

// TLS internal energy (nu0 + delta) p_e.
double internal_energy(const MeanFieldState& s, const SystemParams& p);

// MO energy omega (n + 1/2).
double mechanical_energy(const MeanFieldState& s, const SystemParams& p);

// Rate of energy flow into the TLS from the MO battery, -omega dN/dt.
double work_rate(const MeanFieldState& s, const SystemParams& p);

// Rate of energy flow into the TLS from the bath, (nu0 + delta) dP_e/dt.
// Zero with the bath off.
double heat_rate(const MeanFieldState& s, const SystemParams& p, bool bath_on);

// Running energy accounts of one protocol. work and heat are cumulative
// energies received by the TLS, reset_energy collects the jumps injected by
// instantaneous TLS resets. u and e_mech track the current state;
// entropy_bits is refreshed on demand, not every step.
struct EnergyLedger {
    double work = 0.0;
    double heat = 0.0;
    double reset_energy = 0.0;
    double u = 0.0;
    double e_mech = 0.0;
    double entropy_bits = 0.0;

    double u0 = 0.0;
    double e_mech0 = 0.0;
    double n0 = 0.0;

    double max_first_law_residual = 0.0;      // absolute
    double max_first_law_residual_rel = 0.0;  // relative to the running scale
};

EnergyLedger make_ledger(const MeanFieldState& s, const SystemParams& p);

// Advances the ledger across one RK4 step using the same stage derivatives
// that advanced the state, so the work account and the phonon number stay
// consistent to rounding. Checks the first law and throws
// LedgerInconsistencyError on gross violation.
void accumulate_with_stages(EnergyLedger& led, const MeanFieldState& before,
                            const MeanFieldState& after, const RkStages& st,
                            const SystemParams& p, double dt, bool bath_on);

// Convenience wrapper recomputing the stages from `before`.
void accumulate(EnergyLedger& led, const MeanFieldState& before,
                const SystemParams& p, double dt, bool bath_on);

// Books the TLS energy jump of an instantaneous reset into reset_energy.
void apply_reset_energy(EnergyLedger& led, const MeanFieldState& before,
                        const MeanFieldState& after, const SystemParams& p);

void refresh_entropy(EnergyLedger& led, const MeanFieldState& s);

// (u - u0) - (work + heat + reset_energy). Zero for exact bookkeeping.
double first_law_residual(const EnergyLedger& led);

// (e_mech - e_mech0) + work. Zero when the MO battery pays exactly for the
// work delivered to the TLS.
double battery_residual(const EnergyLedger& led);

// Work done on the TLS by an instantaneous gap quench from energy0 to
// energy_t at frozen population p_e0.
double quench_work(double p_e0, double energy0, double energy_t);

// Second-law gap -Q - k_B T ln2 (H_i - H_f) of a relaxation stroke, where Q
// is the heat received by the TLS and H the binary entropy in bits.
// Non-negative for any protocol coupled to a single bath.
double clausius_gap(double heat_received, double entropy_initial_bits,
                    double entropy_final_bits, double temperature);

}  // namespace optotherm
