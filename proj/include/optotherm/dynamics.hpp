#pragma once

#include <complex>
#include <functional>

#include "optotherm/params.hpp"

namespace optotherm {

struct EnergyLedger;

// Mean-field state of the device. beta is the MO coherent amplitude, n_phonon
// the mean phonon number, p_e the TLS excited population and s_rot the TLS
// coherence in the frame rotating at the bare transition frequency.
struct MeanFieldState {
    std::complex<double> beta{0.0, 0.0};
    double n_phonon = 0.0;
    double p_e = 0.0;
    std::complex<double> s_rot{0.0, 0.0};

    // MO deflection in zero-point units, x / x_0 = 2 Re(beta).
    double deflection() const { return 2.0 * beta.real(); }

    // Coherent amplitude beta0 with n = |beta0|^2 and no TLS coherence.
    static MeanFieldState coherent(std::complex<double> beta0, double p_e);
};

struct Derivative {
    std::complex<double> d_beta{0.0, 0.0};
    double d_n = 0.0;
    double d_pe = 0.0;
    std::complex<double> d_s{0.0, 0.0};
};

// Coupled mean-field equations of motion. With the bath off the TLS
// population is frozen and only the coherence keeps precessing.
Derivative bloch_rhs(const MeanFieldState& s, const SystemParams& p, bool bath_on);

// The four stage derivatives and the three interior stage states of one
// classical RK4 step. Kept public so the energy ledger can integrate power
// with the same stage values that advance the state.
struct RkStages {
    Derivative k1, k2, k3, k4;
    MeanFieldState s2, s3, s4;
};

RkStages rk4_stages(const MeanFieldState& s, const SystemParams& p, bool bath_on,
                    double dt);
MeanFieldState rk4_apply(const MeanFieldState& s, const RkStages& st, double dt);

// One RK4 step. Advances the ledger (if given) with the stage values used for
// the state update, checks for blowup and stamps the time onto any level
// crossing raised inside the right-hand side.
void advance_step(MeanFieldState& s, const SystemParams& p, bool bath_on,
                  double dt, EnergyLedger* ledger, double t_now, long step_index = -1);

struct SegmentSpec {
    double duration = 0.0;
    bool bath_on = true;
    double dt = 0.0;        // <= 0 picks default_timestep(params)
    long sample_every = 0;  // observer cadence in steps; 0 disables sampling
};

using StepObserver =
    std::function<void(double t, const MeanFieldState&, const EnergyLedger&)>;

// Integrates the state over one segment with fixed steps, a shorter final
// step absorbing the remainder so the end time is hit exactly. Returns the
// end time t0 + duration. The observer, when sampling is enabled, sees the
// initial state, every sample_every-th step and the final state.
double evolve_segment(MeanFieldState& s, const SystemParams& p,
                      const SegmentSpec& seg, EnergyLedger& ledger,
                      const StepObserver& observer = {}, double t0 = 0.0);

// Instantaneous TLS reset: population to target, coherence cleared, the MO
// untouched. Energy accounting for the jump is the caller's job.
void reset_tls(MeanFieldState& s, double target_p_e);

}  // namespace optotherm
