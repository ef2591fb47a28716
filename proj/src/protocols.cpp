#include "optotherm/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "optotherm/errors.hpp"
#include "optotherm/kernels.hpp"

namespace optotherm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mech_period(const SystemParams& p) { return 2.0 * std::numbers::pi / p.omega; }

RunSample make_sample(double t, const MeanFieldState& s, const EnergyLedger& led,
                      const SystemParams& p) {
    RunSample r;
    r.t = t;
    r.state = s;
    r.delta = frequency_shift(p.gm, s.beta);
    r.work = led.work;
    r.heat = led.heat;
    r.reset_energy = led.reset_energy;
    r.u = led.u;
    r.e_mech = led.e_mech;
    r.entropy_bits = shannon_entropy_bits(std::clamp(s.p_e, 0.0, 1.0));
    return r;
}

// Root of the cubic Hermite interpolant of Im(beta) over one step, as a
// fraction of the step. y/d are the values/derivatives at the endpoints.
double hermite_root(double y0, double d0, double y1, double d1, double h) {
    double th = (y0 - y1) != 0.0 ? y0 / (y0 - y1) : 0.5;
    th = std::clamp(th, 0.0, 1.0);
    for (int it = 0; it < 3; ++it) {
        const double t2 = th * th, t3 = t2 * th;
        const double val = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 +
                           (t3 - 2.0 * t2 + th) * h * d0 +
                           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * d1;
        const double der = (6.0 * t2 - 6.0 * th) * y0 +
                           (3.0 * t2 - 4.0 * th + 1.0) * h * d0 +
                           (-6.0 * t2 + 6.0 * th) * y1 + (3.0 * t2 - 2.0 * th) * h * d1;
        if (der == 0.0) break;
        th = std::clamp(th - val / der, 0.0, 1.0);
    }
    return th;
}

using StepCallback =
    std::function<void(double, const MeanFieldState&, const EnergyLedger&)>;

struct TurningRun {
    RunRecord record;
    double t_star = 0.0;
};

// Integrates until the MO deflection turns around: d(x)/dt = 2 omega Im(beta),
// so the turning point is the first sign change of Im(beta) after an initial
// guard of a tenth of a period. The crossing is refined to ~1e-6 of a period
// and the state and ledger are re-advanced from the previous step so every
// reported quantity refers to t_star exactly.
TurningRun run_until_turning(const MeanFieldState& start, const SystemParams& p,
                             bool bath_on, double dt, long sample_cap,
                             const StepCallback& step_cb = {}) {
    const double period = mech_period(p);
    const double t_min = 0.1 * period;
    const double t_max = 2.0 * period;

    TurningRun out;
    out.record.params = p;
    out.record.initial_state = start;
    out.record.dt = dt;
    out.record.warnings = p.regime_warnings();

    MeanFieldState s = start;
    EnergyLedger led = make_ledger(s, p);

    long stride = 0;
    if (sample_cap > 0) {
        const long est = static_cast<long>(0.55 * period / dt) + 1;
        stride = std::max(1L, est / sample_cap);
        out.record.samples.push_back(make_sample(0.0, s, led, p));
    }

    MeanFieldState prev = s;
    EnergyLedger prev_led = led;
    for (long i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (t > t_max)
            throw std::runtime_error("no turning point within two mechanical periods");
        prev = s;
        prev_led = led;
        advance_step(s, p, bath_on, dt, &led, t, i);
        const double t_next = t + dt;
        if (step_cb) step_cb(t_next, s, led);
        if (stride > 0 && (i + 1) % stride == 0)
            out.record.samples.push_back(make_sample(t_next, s, led, p));

        const double y0 = prev.beta.imag(), y1 = s.beta.imag();
        if (t_next > t_min && y0 != 0.0 && (y0 > 0.0 ? y1 <= 0.0 : y1 >= 0.0)) {
            const double d0 = bloch_rhs(prev, p, bath_on).d_beta.imag();
            const double d1 = bloch_rhs(s, p, bath_on).d_beta.imag();
            const double frac = hermite_root(y0, d0, y1, d1, dt);
            const double dt_part = frac * dt;
            s = prev;
            led = prev_led;
            if (dt_part > 0.0) advance_step(s, p, bath_on, dt_part, &led, t, i);
            out.t_star = t + dt_part;
            if (step_cb) step_cb(out.t_star, s, led);
            break;
        }
    }

    refresh_entropy(led, s);
    out.record.final_state = s;
    out.record.ledger = led;
    out.record.t_final = out.t_star;
    if (stride > 0)
        out.record.samples.push_back(make_sample(out.t_star, s, led, p));
    return out;
}

double resolve_dt(const SystemParams& p, double dt) {
    return dt > 0.0 ? dt : default_timestep(p);
}

void parallel_points(std::size_t n, int jobs,
                     const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, jobs);
    const std::size_t workers = std::min<std::size_t>(jobs, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

// Fills row i of a sweep, catching per-point failures so the sweep reports
// them in place of aborting.
void guarded_point(SweepResult& sw, std::size_t i,
                   const std::function<std::vector<double>()>& compute) {
    try {
        sw.rows[i] = compute();
        sw.row_status[i].clear();
    } catch (const std::exception& e) {
        sw.rows[i].assign(sw.columns.size(), kNan);
        sw.row_status[i] = e.what();
    }
}

}  // namespace

int SweepResult::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

double SweepResult::at(std::size_t row, std::string_view name) const {
    const int c = column(name);
    if (c < 0 || row >= rows.size())
        throw std::out_of_range("SweepResult::at: no such cell");
    return rows[row][static_cast<std::size_t>(c)];
}

RunRecord isothermal_cycle(const SystemParams& p, double beta0, int periods,
                           double dt, long sample_cap) {
    p.validate();
    if (periods < 1) throw ConfigError("isothermal_cycle: periods must be >= 1");
    const double h = resolve_dt(p, dt);

    MeanFieldState s = MeanFieldState::coherent(beta0, 0.0);
    s.p_e = fermi_population(p.nu0 + frequency_shift(p.gm, s.beta), p.temperature);

    RunRecord rec;
    rec.params = p;
    rec.protocol = "isothermal";
    rec.initial_state = s;
    rec.dt = h;
    rec.warnings = p.regime_warnings();

    EnergyLedger led = make_ledger(s, p);
    SegmentSpec seg;
    seg.duration = periods * mech_period(p);
    seg.bath_on = true;
    seg.dt = h;
    const long est = static_cast<long>(seg.duration / h) + 1;
    seg.sample_every = sample_cap > 0 ? std::max(1L, est / sample_cap) : 0;

    StepObserver obs;
    if (sample_cap > 0)
        obs = [&rec, &p](double t, const MeanFieldState& st, const EnergyLedger& l) {
            rec.samples.push_back(make_sample(t, st, l, p));
        };
    rec.t_final = evolve_segment(s, p, seg, led, obs);
    refresh_entropy(led, s);
    rec.final_state = s;
    rec.ledger = led;
    return rec;
}

HalfSwingResult isothermal_half_swing(const SystemParams& p, double beta0,
                                      StrokeDirection dir, double dt,
                                      long sample_cap) {
    p.validate();
    if (!(beta0 > 0.0))
        throw ConfigError("isothermal_half_swing: beta0 must be positive");
    const double h = resolve_dt(p, dt);
    const double b0 = dir == StrokeDirection::extraction ? beta0 : -beta0;

    MeanFieldState s = MeanFieldState::coherent(b0, 0.0);
    const double e0 = p.nu0 + frequency_shift(p.gm, s.beta);
    s.p_e = fermi_population(e0, p.temperature);

    TurningRun run = run_until_turning(s, p, true, h, sample_cap);
    run.record.protocol =
        dir == StrokeDirection::extraction ? "extraction" : "erasure";

    HalfSwingResult r;
    r.t_star = run.t_star;
    r.energy_initial = e0;
    r.energy_final =
        p.nu0 + frequency_shift(p.gm, run.record.final_state.beta);
    r.entropy_initial_bits = shannon_entropy_bits(s.p_e);
    r.entropy_final_bits =
        shannon_entropy_bits(std::clamp(run.record.final_state.p_e, 0.0, 1.0));
    r.work = run.record.ledger.work;
    r.heat = run.record.ledger.heat;
    r.record = std::move(run.record);
    return r;
}

double adiabatic_turning_point(double gm, double omega, double p_e, double x_m) {
    if (omega <= 0.0)
        throw std::domain_error("adiabatic_turning_point: omega must be positive");
    return -4.0 * gm * p_e / omega - x_m;
}

double adiabatic_stroke_work(double gm, double omega, double x_m) {
    if (omega <= 0.0)
        throw std::domain_error("adiabatic_stroke_work: omega must be positive");
    return 2.0 * gm * (2.0 * gm / omega + x_m);
}

TransducerResult adiabatic_transducer(const SystemParams& p, double x_m,
                                      double p_e, double dt, long sample_cap) {
    p.validate();
    if (!(p_e >= 0.0 && p_e <= 1.0))
        throw ConfigError("adiabatic_transducer: p_e outside [0, 1]");
    const double h = resolve_dt(p, dt);

    // Released on the positive side; the rest position displaced by the
    // excited TLS sits at -2 g_m p_e / omega, so the swing overshoots to
    // -4 g_m p_e / omega - x_m.
    MeanFieldState s = MeanFieldState::coherent(0.5 * x_m, p_e);

    TurningRun run = run_until_turning(s, p, false, h, sample_cap);
    run.record.protocol = "transducer";

    TransducerResult r;
    r.x_start = x_m;
    r.x_turn = run.record.final_state.deflection();
    r.delta_at_turn = frequency_shift(p.gm, run.record.final_state.beta);
    r.t_turn = run.t_star;
    r.work_extracted = run.record.ledger.e_mech - run.record.ledger.e_mech0;
    r.record = std::move(run.record);
    return r;
}

OttoResult otto_cycle(const SystemParams& p, double x_m1, int iterations,
                      OttoMode mode, double dt) {
    p.validate();
    if (iterations < 1) throw ConfigError("otto_cycle: iterations must be >= 1");
    if (x_m1 < 0.0) throw ConfigError("otto_cycle: x_m1 must be >= 0");
    const double h = resolve_dt(p, dt);
    const double half = 0.5 * mech_period(p);

    OttoResult out;
    out.mode = mode;
    out.iterations.reserve(iterations);

    // Shared MO register. Averaging the branches makes N exceed |beta|^2 by
    // the accumulated spread; the work stroke only feels beta, so the
    // incoherent remainder rides along untouched.
    std::complex<double> beta = 0.5 * x_m1;
    double n_phonon = std::norm(beta);

    SegmentSpec stroke;
    stroke.duration = half;
    stroke.bath_on = false;
    stroke.dt = h;

    double cumulative = 0.0;
    for (int n = 1; n <= iterations; ++n) {
        OttoIteration it;
        it.n = n;
        it.amplitude_start = 2.0 * beta.real();

        double w_extracted = 0.0;
        if (mode == OttoMode::branch_average) {
            MeanFieldState exc;
            exc.beta = beta;
            exc.n_phonon = n_phonon;
            exc.p_e = 1.0;
            MeanFieldState gnd = exc;
            gnd.p_e = 0.0;

            EnergyLedger led_e = make_ledger(exc, p);
            evolve_segment(exc, p, stroke, led_e);
            EnergyLedger led_g = make_ledger(gnd, p);
            evolve_segment(gnd, p, stroke, led_g);

            w_extracted = 0.5 * (-led_e.work - led_g.work);
            beta = 0.5 * (exc.beta + gnd.beta);
            n_phonon = 0.5 * (exc.n_phonon + gnd.n_phonon);
        } else {
            MeanFieldState s;
            s.beta = beta;
            s.n_phonon = n_phonon;
            s.p_e = 0.5;
            EnergyLedger led = make_ledger(s, p);
            evolve_segment(s, p, stroke, led);
            w_extracted = -led.work;
            beta = s.beta;
            n_phonon = s.n_phonon;
        }

        // Reset to ground and let the MO swing back freely.
        MeanFieldState back;
        back.beta = beta;
        back.n_phonon = n_phonon;
        back.p_e = 0.0;
        EnergyLedger led_back = make_ledger(back, p);
        evolve_segment(back, p, stroke, led_back);
        beta = back.beta;
        n_phonon = back.n_phonon;

        cumulative += w_extracted;
        it.work_extracted = w_extracted;
        it.amplitude_end = 2.0 * beta.real();
        it.work_cumulative = cumulative;
        out.iterations.push_back(it);
    }
    out.total_work = cumulative;
    return out;
}

double otto_work_formula(const SystemParams& p, int n, double x_m1, OttoMode mode) {
    const double per_iter = mode == OttoMode::branch_average
                                ? 2.0 * n * p.gm / p.omega
                                : (2.0 * n - 1.0) * p.gm / p.omega;
    return p.gm * (per_iter + x_m1);
}

std::vector<double> engine_power_watts(const OttoResult& otto,
                                       const SystemParams& p,
                                       const UnitConversion& conv) {
    // P_n = W_n omega: one work stroke per inverse mechanical frequency.
    std::vector<double> out;
    out.reserve(otto.iterations.size());
    for (const OttoIteration& it : otto.iterations)
        out.push_back(conv.watts(it.work_extracted * p.omega));
    return out;
}

double reversible_isothermal_work(double energy_i, double energy_f,
                                  double temperature) {
    if (temperature < 0.0)
        throw std::domain_error("reversible_isothermal_work: negative temperature");
    if (temperature == 0.0)
        return std::min(energy_f, 0.0) - std::min(energy_i, 0.0);
    const auto softplus = [](double y) {
        // ln(1 + e^y) without overflow on either side.
        return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
    };
    return temperature * (softplus(-energy_i / temperature) -
                          softplus(-energy_f / temperature));
}

double reversible_isothermal_work_quadrature(double energy_i, double energy_f,
                                             double temperature, int panels) {
    if (panels < 2) throw std::invalid_argument("quadrature: panels < 2");
    if (panels % 2 != 0) ++panels;
    const double h = (energy_f - energy_i) / panels;
    double acc = fermi_population(energy_i, temperature) +
                 fermi_population(energy_f, temperature);
    for (int k = 1; k < panels; ++k)
        acc += (k % 2 == 1 ? 4.0 : 2.0) *
               fermi_population(energy_i + k * h, temperature);
    return acc * h / 3.0;
}

SweepResult reversibility_sweep(const SystemParams& p, double beta0,
                                const std::vector<double>& omegas, int jobs,
                                double dt) {
    SweepResult sw;
    sw.columns = {"omega",          "work",         "work_reversible", "ratio",
                  "energy_initial", "energy_final", "t_star"};
    sw.rows.resize(omegas.size());
    sw.row_status.resize(omegas.size());

    parallel_points(omegas.size(), jobs, [&](std::size_t i) {
        guarded_point(sw, i, [&]() -> std::vector<double> {
            SystemParams q = p;
            q.omega = omegas[i];
            const HalfSwingResult r = isothermal_half_swing(
                q, beta0, StrokeDirection::extraction, dt);
            const double w_rev = reversible_isothermal_work(
                r.energy_initial, r.energy_final, q.temperature);
            const double ratio = w_rev != 0.0 ? r.work / w_rev : kNan;
            return {q.omega,          r.work,          w_rev, ratio,
                    r.energy_initial, r.energy_final, r.t_star};
        });
    });
    return sw;
}

SweepResult bracketing_sweep(const SystemParams& p, double beta0,
                             const std::vector<double>& omegas, int jobs,
                             double dt) {
    SweepResult sw;
    sw.columns = {"omega",      "work",        "work_reversible", "work_quench",
                  "margin_low", "margin_high", "t_star"};
    sw.rows.resize(omegas.size());
    sw.row_status.resize(omegas.size());

    parallel_points(omegas.size(), jobs, [&](std::size_t i) {
        guarded_point(sw, i, [&]() -> std::vector<double> {
            SystemParams q = p;
            q.omega = omegas[i];
            q.validate();
            const double h = resolve_dt(q, dt);

            MeanFieldState s = MeanFieldState::coherent(-beta0, 0.0);
            const double e0 = q.nu0 + frequency_shift(q.gm, s.beta);
            const double p0 = fermi_population(e0, q.temperature);
            s.p_e = p0;

            double margin_low = std::numeric_limits<double>::infinity();
            double margin_high = std::numeric_limits<double>::infinity();
            const auto track = [&](double, const MeanFieldState& st,
                                   const EnergyLedger& led) {
                const double e_t = q.nu0 + frequency_shift(q.gm, st.beta);
                const double w_rev =
                    reversible_isothermal_work(e0, e_t, q.temperature);
                const double w_q = quench_work(p0, e0, e_t);
                margin_low = std::min(margin_low, led.work - w_rev);
                margin_high = std::min(margin_high, w_q - led.work);
            };

            TurningRun run = run_until_turning(s, q, true, h, 0, track);
            const double e_f =
                q.nu0 + frequency_shift(q.gm, run.record.final_state.beta);
            return {q.omega,
                    run.record.ledger.work,
                    reversible_isothermal_work(e0, e_f, q.temperature),
                    quench_work(p0, e0, e_f),
                    margin_low,
                    margin_high,
                    run.t_star};
        });
    });
    return sw;
}

SweepResult clausius_sweep(const SystemParams& p,
                           const std::vector<double>& temperatures,
                           const std::vector<std::vector<double>>& beta0_grids,
                           int jobs, double dt) {
    if (temperatures.size() != beta0_grids.size())
        throw ConfigError("clausius_sweep: one beta0 grid per temperature required");

    SweepResult sw;
    sw.columns = {"temperature", "beta0",           "t_star",
                  "energy_initial", "energy_final", "heat",
                  "delta_entropy_bits", "clausius_gap", "landauer_work"};

    std::vector<std::pair<std::size_t, double>> points;
    for (std::size_t ti = 0; ti < temperatures.size(); ++ti)
        for (double b : beta0_grids[ti]) points.emplace_back(ti, b);
    sw.rows.resize(points.size());
    sw.row_status.resize(points.size());

    parallel_points(points.size(), jobs, [&](std::size_t i) {
        guarded_point(sw, i, [&]() -> std::vector<double> {
            SystemParams q = p;
            q.temperature = temperatures[points[i].first];
            const double b0 = points[i].second;
            const HalfSwingResult r =
                isothermal_half_swing(q, b0, StrokeDirection::extraction, dt);
            const double dh = r.entropy_initial_bits - r.entropy_final_bits;
            const double gap = clausius_gap(r.heat, r.entropy_initial_bits,
                                            r.entropy_final_bits, q.temperature);
            return {q.temperature, b0,     r.t_star,
                    r.energy_initial, r.energy_final, r.heat,
                    dh, gap, landauer_bound(q.temperature)};
        });
    });

    // Per-temperature least-squares fit of heat against the entropy change.
    for (std::size_t ti = 0; ti < temperatures.size(); ++ti) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].first != ti || !sw.row_status[i].empty()) continue;
            const double x = sw.at(i, "delta_entropy_bits");
            const double y = sw.at(i, "heat");
            sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
        }
        double slope = kNan, rms_frac = kNan, dh_max = kNan;
        if (m >= 2) {
            const double denom = m * sxx - sx * sx;
            slope = (m * sxy - sx * sy) / denom;
            const double intercept = (sy - slope * sx) / m;
            double ss = 0.0, xmin = 0.0, xmax = 0.0, amax = 0.0;
            bool first = true;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (points[i].first != ti || !sw.row_status[i].empty()) continue;
                const double x = sw.at(i, "delta_entropy_bits");
                const double y = sw.at(i, "heat");
                const double resid = y - (slope * x + intercept);
                ss += resid * resid;
                xmin = first ? x : std::min(xmin, x);
                xmax = first ? x : std::max(xmax, x);
                amax = std::max(amax, std::abs(x));
                first = false;
            }
            const double range = xmax - xmin;
            rms_frac = range > 0.0
                           ? std::sqrt(ss / m) / (std::abs(slope) * range)
                           : kNan;
            dh_max = amax;
        }
        const std::string suffix = "_" + std::to_string(ti);
        sw.summary.emplace_back("T" + suffix, temperatures[ti]);
        sw.summary.emplace_back("slope" + suffix, slope);
        sw.summary.emplace_back("rms_resid" + suffix, rms_frac);
        sw.summary.emplace_back("dh_range" + suffix, dh_max);
    }
    return sw;
}

}  // namespace optotherm
