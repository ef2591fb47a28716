#include "optotherm/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "optotherm/energetics.hpp"
#include "optotherm/errors.hpp"
#include "optotherm/kernels.hpp"

namespace optotherm {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

MeanFieldState euler(const MeanFieldState& s, const Derivative& d, double h) {
    MeanFieldState r = s;
    r.beta += h * d.d_beta;
    r.n_phonon += h * d.d_n;
    r.p_e += h * d.d_pe;
    r.s_rot += h * d.d_s;
    return r;
}

bool finite(const MeanFieldState& s) {
    return std::isfinite(s.beta.real()) && std::isfinite(s.beta.imag()) &&
           std::isfinite(s.n_phonon) && std::isfinite(s.p_e) &&
           std::isfinite(s.s_rot.real()) && std::isfinite(s.s_rot.imag());
}

std::string snapshot(const MeanFieldState& s) {
    std::ostringstream os;
    os << "beta = (" << s.beta.real() << ", " << s.beta.imag() << "), n = "
       << s.n_phonon << ", p_e = " << s.p_e;
    return os.str();
}

}  // namespace

MeanFieldState MeanFieldState::coherent(std::complex<double> beta0, double p_e) {
    MeanFieldState s;
    s.beta = beta0;
    s.n_phonon = std::norm(beta0);
    s.p_e = p_e;
    return s;
}

Derivative bloch_rhs(const MeanFieldState& s, const SystemParams& p, bool bath_on) {
    Derivative d;
    const double delta = frequency_shift(p.gm, s.beta);
    d.d_beta = -kI * (p.omega * s.beta + p.gm * s.p_e);
    d.d_n = -2.0 * p.gm * s.p_e * s.beta.imag();
    if (bath_on) {
        const BathRates br =
            bath_rates(p.nu0, delta, p.temperature, p.gamma, p.bath_exponent);
        const double decay = br.gamma_t * (2.0 * br.nbar_t + 1.0);
        d.d_pe = -decay * s.p_e + br.gamma_t * br.nbar_t;
        d.d_s = (-kI * delta - 0.5 * decay) * s.s_rot;
    } else {
        d.d_pe = 0.0;
        d.d_s = -kI * delta * s.s_rot;
    }
    return d;
}

RkStages rk4_stages(const MeanFieldState& s, const SystemParams& p, bool bath_on,
                    double dt) {
    RkStages st;
    st.k1 = bloch_rhs(s, p, bath_on);
    st.s2 = euler(s, st.k1, 0.5 * dt);
    st.k2 = bloch_rhs(st.s2, p, bath_on);
    st.s3 = euler(s, st.k2, 0.5 * dt);
    st.k3 = bloch_rhs(st.s3, p, bath_on);
    st.s4 = euler(s, st.k3, dt);
    st.k4 = bloch_rhs(st.s4, p, bath_on);
    return st;
}

MeanFieldState rk4_apply(const MeanFieldState& s, const RkStages& st, double dt) {
    const double h = dt / 6.0;
    MeanFieldState r = s;
    r.beta += h * (st.k1.d_beta + 2.0 * st.k2.d_beta + 2.0 * st.k3.d_beta + st.k4.d_beta);
    r.n_phonon += h * (st.k1.d_n + 2.0 * st.k2.d_n + 2.0 * st.k3.d_n + st.k4.d_n);
    r.p_e += h * (st.k1.d_pe + 2.0 * st.k2.d_pe + 2.0 * st.k3.d_pe + st.k4.d_pe);
    r.s_rot += h * (st.k1.d_s + 2.0 * st.k2.d_s + 2.0 * st.k3.d_s + st.k4.d_s);
    return r;
}

void advance_step(MeanFieldState& s, const SystemParams& p, bool bath_on,
                  double dt, EnergyLedger* ledger, double t_now, long step_index) {
    try {
        const RkStages st = rk4_stages(s, p, bath_on, dt);
        const MeanFieldState next = rk4_apply(s, st, dt);
        if (!finite(next))
            throw IntegrationBlowupError(t_now, step_index, snapshot(next));
        if (ledger) accumulate_with_stages(*ledger, s, next, st, p, dt, bath_on);
        s = next;
    } catch (const LevelCrossingError& e) {
        if (e.time() < 0.0) throw LevelCrossingError(e.shifted_freq(), t_now);
        throw;
    }
}

double evolve_segment(MeanFieldState& s, const SystemParams& p,
                      const SegmentSpec& seg, EnergyLedger& ledger,
                      const StepObserver& observer, double t0) {
    if (!(seg.duration >= 0.0))
        throw std::invalid_argument("evolve_segment: negative duration");
    if (seg.duration == 0.0) return t0;

    const double dt = seg.dt > 0.0 ? seg.dt : default_timestep(p);
    const long n_full = static_cast<long>(seg.duration / dt);
    const double remainder = seg.duration - static_cast<double>(n_full) * dt;
    const bool sampling = observer && seg.sample_every > 0;

    if (sampling) observer(t0, s, ledger);
    for (long i = 0; i < n_full; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        advance_step(s, p, seg.bath_on, dt, &ledger, t, i);
        if (sampling && (i + 1) % seg.sample_every == 0 &&
            !(i + 1 == n_full && remainder <= 1e-12 * dt))
            observer(t + dt, s, ledger);
    }
    if (remainder > 1e-12 * dt)
        advance_step(s, p, seg.bath_on, remainder, &ledger,
                     t0 + static_cast<double>(n_full) * dt, n_full);
    if (sampling) observer(t0 + seg.duration, s, ledger);
    return t0 + seg.duration;
}

void reset_tls(MeanFieldState& s, double target_p_e) {
    if (!(target_p_e >= 0.0 && target_p_e <= 1.0))
        throw std::domain_error("reset_tls: target population outside [0, 1]");
    s.p_e = target_p_e;
    s.s_rot = {0.0, 0.0};
}

}  // namespace optotherm
