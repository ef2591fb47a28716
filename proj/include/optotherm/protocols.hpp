#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optotherm/dynamics.hpp"
#include "optotherm/energetics.hpp"
#include "optotherm/params.hpp"

namespace optotherm {

struct RunSample {
    double t = 0.0;
    MeanFieldState state;
    double delta = 0.0;
    double work = 0.0;
    double heat = 0.0;
    double reset_energy = 0.0;
    double u = 0.0;
    double e_mech = 0.0;
    double entropy_bits = 0.0;
};

struct RunRecord {
    SystemParams params;
    std::string protocol;
    MeanFieldState initial_state;
    MeanFieldState final_state;
    EnergyLedger ledger;
    std::vector<RunSample> samples;
    double t_final = 0.0;
    double dt = 0.0;
    std::vector<std::string> warnings;
};

// Free evolution of the coupled system with the bath held on, sampled over a
// whole number of mechanical periods. Starts from a real coherent amplitude
// beta0 with the TLS equilibrated to the initial gap.
RunRecord isothermal_cycle(const SystemParams& p, double beta0, int periods = 1,
                           double dt = 0.0, long sample_cap = 2000);

// Which way the MO is released at t = 0. Starting on the positive side pulls
// the transition frequency down as the MO swings (work extraction, entropy
// gain); starting on the negative side drives it up (erasure, entropy loss).
enum class StrokeDirection { extraction, erasure };

// Half a mechanical swing at fixed bath contact: released at |beta0|, stopped
// at the first turning point of the deflection (detected by the sign change
// of Im(beta) and refined to ~1e-6 of a period). Initial TLS population is
// the equilibrium one for the initial gap.
struct HalfSwingResult {
    RunRecord record;
    double t_star = 0.0;
    double energy_initial = 0.0;
    double energy_final = 0.0;
    double entropy_initial_bits = 0.0;
    double entropy_final_bits = 0.0;
    double work = 0.0;  // ledger work over the stroke, < 0 when extracting
    double heat = 0.0;
};

HalfSwingResult isothermal_half_swing(const SystemParams& p, double beta0,
                                      StrokeDirection dir, double dt = 0.0,
                                      long sample_cap = 0);

// Closed forms for one decoupled (bath-off) half swing with the TLS fully
// excited fraction p_e. Valid for any sign of g_m and x_m.
double adiabatic_turning_point(double gm, double omega, double p_e, double x_m);
double adiabatic_stroke_work(double gm, double omega, double x_m);

// Bath-off half swing from deflection -x_m with the TLS pinned at p_e: the
// displaced rest position turns the swing around at
// -4 g_m p_e / omega - x_m, loading the MO battery.
struct TransducerResult {
    RunRecord record;
    double work_extracted = 0.0;  // energy gained by the MO
    double x_start = 0.0;
    double x_turn = 0.0;
    double delta_at_turn = 0.0;
    double t_turn = 0.0;
};

TransducerResult adiabatic_transducer(const SystemParams& p, double x_m,
                                      double p_e = 1.0, double dt = 0.0,
                                      long sample_cap = 0);

// Repeated transduction: excite, half swing, reset to ground, free half
// swing back. branch_average propagates the excited and ground branches
// separately from the shared MO state and averages; mean_field propagates
// one trajectory at p_e = 1/2. Both see the same MO amplitude growth but
// book different work: the mean-field account misses g_m^2/omega per
// iteration of TLS-MO correlation.
enum class OttoMode { branch_average, mean_field };

struct OttoIteration {
    int n = 0;
    double work_extracted = 0.0;   // into the MO, this iteration
    double amplitude_start = 0.0;  // |x|/x_0 at the start of the stroke
    double amplitude_end = 0.0;
    double work_cumulative = 0.0;
};

struct OttoResult {
    OttoMode mode = OttoMode::branch_average;
    std::vector<OttoIteration> iterations;
    double total_work = 0.0;
};

OttoResult otto_cycle(const SystemParams& p, double x_m1, int iterations,
                      OttoMode mode = OttoMode::branch_average, double dt = 0.0);

// Per-iteration work of the cycle above in closed form.
double otto_work_formula(const SystemParams& p, int n, double x_m1, OttoMode mode);

// Extracted power of iteration n in watts, W_n omega mapped through the
// device calibration.
std::vector<double> engine_power_watts(const OttoResult& otto,
                                       const SystemParams& p,
                                       const UnitConversion& conv);

// Minimum work to move the TLS gap from energy_i to energy_f in contact with
// a bath at temperature T, staying equilibrated throughout:
//   T [ln(1 + e^{-E_i/T}) - ln(1 + e^{-E_f/T})] ... sign such that the value
// is the work done ON the system (negative when the gap drops).
double reversible_isothermal_work(double energy_i, double energy_f,
                                  double temperature);

// Same quantity by composite-Simpson quadrature of fermi(E) dE. Slower;
// kept as an independent cross-check of the closed form.
double reversible_isothermal_work_quadrature(double energy_i, double energy_f,
                                             double temperature,
                                             int panels = 10000);

// Generic sweep container. One row per point; points that fail keep their
// row with NaN values and the error text in row_status.
struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_status;
    std::vector<std::pair<std::string, double>> summary;

    int column(std::string_view name) const;  // -1 when absent
    double at(std::size_t row, std::string_view name) const;
};

// Work of the extraction half swing against the reversible bound, per
// mechanical frequency. Columns: omega, work, work_reversible, ratio,
// energy_initial, energy_final, t_star.
SweepResult reversibility_sweep(const SystemParams& p, double beta0,
                                const std::vector<double>& omegas, int jobs = 1,
                                double dt = 0.0);

// Erasure half swing per mechanical frequency, tracking how tightly the
// realized work is bracketed between the reversible bound and the sudden
// quench from below and above. margin_low = min_t [w(t) - w_rev(t)],
// margin_high = min_t [w_quench(t) - w(t)]; both stay >= 0 up to integration
// error. Columns: omega, work, work_reversible, work_quench, margin_low,
// margin_high, t_star.
SweepResult bracketing_sweep(const SystemParams& p, double beta0,
                             const std::vector<double>& omegas, int jobs = 1,
                             double dt = 0.0);

// Extraction half swing over a grid of release amplitudes per temperature.
// Columns: temperature, beta0, t_star, energy_initial, energy_final, heat,
// delta_entropy_bits (H_i - H_f), clausius_gap, landauer_work. Summary holds
// per-temperature regression of heat against delta_entropy_bits: T_<i>,
// slope_<i>, rms_resid_<i>, dh_range_<i>.
SweepResult clausius_sweep(const SystemParams& p,
                           const std::vector<double>& temperatures,
                           const std::vector<std::vector<double>>& beta0_grids,
                           int jobs = 1, double dt = 0.0);

}  // namespace optotherm
