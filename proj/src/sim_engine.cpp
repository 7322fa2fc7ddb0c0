#include "clocksync/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clocksync/errors.hpp"

namespace clocksync {

HybridState initial_state(double tau_i0, double tau_k0, double a_i, double a_k, double c) {
    HybridState x;
    x.tau_i = tau_i0;
    x.tau_k = tau_k0;
    x.a_i = a_i;
    x.a_k = a_k;
    x.tau = c;
    x.eps = {tau_i0 - tau_k0, a_i - a_k};
    return x;
}

HybridState advance_flow(const HybridState& state, double delta, double rate_noise) {
    if (!(delta >= 0.0) || delta > state.tau)
        throw Error(ErrorCode::FlowDomainViolation,
                    "delta " + std::to_string(delta) + " outside [0, " + std::to_string(state.tau) + "]");
    HybridState x = state;
    x.tau_i += (x.a_i + rate_noise) * delta;
    x.tau_k += (x.a_k + rate_noise) * delta;
    x.tau -= delta;
    x.eps.x1 += x.eps.x2 * delta;
    return x;
}

HybridState apply_jump(const HybridState& state, double delay_draw, const Params& params) {
    if (state.tau != 0.0)
        throw Error(ErrorCode::NotInJumpSet, "timer is " + std::to_string(state.tau));
    HybridState x = state;
    switch (state.p) {
    case 0: // i sends
        x.mem_i = shift_in(x.tau_i, x.mem_i);
        x.tau = delay_draw;
        x.q = 1;
        break;
    case 1: // k receives
        x.mem_k = shift_in(x.tau_k, x.mem_i);
        x.tau = params.c;
        x.q = 0;
        break;
    case 2: // k replies
        x.mem_k = shift_in(x.tau_k, x.mem_k);
        x.tau = delay_draw;
        x.q = 1;
        break;
    case 3: // i receives
        x.mem_i = shift_in(x.tau_i, x.mem_k);
        x.tau = params.c;
        x.q = 0;
        break;
    case 4: // i sends its record
        x.mem_i = shift_in(x.tau_i, x.mem_i);
        x.tau = delay_draw;
        x.q = 1;
        break;
    case 5: { // k receives and corrects
        const CorrectionPair k = corrections(x.mem_i, x.tau_k, params.mu);
        x.mem_k = shift_in(x.tau_k, x.mem_i);
        x.tau_k -= k.k_offset;
        x.a_k += k.k_rate;
        x.eps.x1 += k.k_offset;
        x.eps.x2 -= k.k_rate;
        x.tau = params.c;
        x.q = 0;
        x.p = 0;
        return x;
    }
    default:
        throw Error(ErrorCode::CorruptPhase, "phase " + std::to_string(state.p));
    }
    x.p += 1;
    return x;
}

double next_event(const HybridState& state) { return state.tau; }

namespace {

double elapsed(const HybridState& x, double c, double d) {
    return (1 - x.q) * c + x.q * d - x.tau;
}

bool near(double a, double b) { return std::abs(a - b) <= kTolMem; }

} // namespace

double rho_i(const HybridState& x, double beta, double c, double d) {
    return x.tau_i - x.a_i * elapsed(x, c, d) - x.a_i * beta;
}

double rho_k(const HybridState& x, double beta, double c, double d) {
    return x.tau_k - x.a_k * elapsed(x, c, d) - x.a_k * beta;
}

std::optional<int> memory_class(const HybridState& x, double c, double d) {
    const auto& mi = x.mem_i;
    const auto& mk = x.mem_k;
    auto ri = [&](double b) { return rho_i(x, b, c, d); };
    auto rk = [&](double b) { return rho_k(x, b, c, d); };
    bool ok = false;
    switch (x.p) {
    case 0:
        ok = x.q == 0;
        break;
    case 1:
        ok = x.q == 1 && near(mi[0], ri(0));
        break;
    case 2:
        ok = x.q == 0 && near(mk[0], rk(0)) && near(mk[1], ri(d));
        break;
    case 3:
        ok = x.q == 1 && near(mk[0], rk(0)) && near(mk[1], rk(c)) && near(mk[2], ri(c + d));
        break;
    case 4:
        ok = x.q == 0 && near(mi[0], ri(0)) && near(mi[1], rk(d)) && near(mi[2], rk(c + d)) &&
             near(mi[3], ri(c + 2 * d));
        break;
    case 5:
        ok = x.q == 1 && near(mi[0], ri(0)) && near(mi[1], ri(c)) && near(mi[2], rk(c + d)) &&
             near(mi[3], rk(2 * c + d)) && near(mi[4], ri(2 * c + 2 * d));
        break;
    default:
        break;
    }
    if (!ok)
        return std::nullopt;
    return x.p + 1;
}

namespace {

// Event times within this slack of t_max are still taken.
double horizon_slack(double t_max) {
    return std::isfinite(t_max) ? 1e-9 * std::max(1.0, std::abs(t_max)) : 0.0;
}

void push_flow(Trajectory& traj, const HybridState& start, double t0, std::int64_t j, double dt,
               double m, int substeps) {
    for (int s = 1; s <= substeps; ++s) {
        const double h = dt * s / (substeps + 1);
        traj.samples.push_back({{t0 + h, j}, advance_flow(start, h, m)});
    }
}

} // namespace

Trajectory run(const HybridState& initial, const Params& params, const Horizon& horizon,
               const NoiseModel& noise, std::uint64_t seed, const RunOptions& opts) {
    Trajectory traj;
    traj.params = params;
    traj.nominal = noise.nominal();
    NoiseStream ns(noise, seed);

    HybridState x = initial;
    double t = 0.0;
    std::int64_t j = 0;
    traj.samples.push_back({{t, j}, x});
    const double slack = horizon_slack(horizon.t_max);

    while (j < horizon.j_max) {
        const double dt = next_event(x);
        const double m = ns.rate();
        if (t + dt > horizon.t_max + slack) {
            const double rest = horizon.t_max - t;
            if (rest > 0.0) {
                push_flow(traj, x, t, j, rest, m, opts.flow_substeps);
                x = advance_flow(x, rest, m);
                traj.samples.push_back({{horizon.t_max, j}, x});
            }
            break;
        }
        if (dt > 0.0) {
            push_flow(traj, x, t, j, dt, m, opts.flow_substeps);
            x = advance_flow(x, dt, m);
            t += dt;
            traj.samples.push_back({{t, j}, x});
        }
        const bool transit = x.p == 0 || x.p == 2 || x.p == 4;
        const double delay = transit ? ns.delay(params.d) : params.d;
        x = apply_jump(x, delay, params);
        ++j;
        traj.samples.push_back({{t, j}, x});
    }
    return traj;
}

} // namespace clocksync
