#include "clocksync/multi_agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clocksync/error_model.hpp"
#include "clocksync/errors.hpp"

namespace clocksync {

double cycle_length(double c, double d) { return 3.0 * c + 3.0 * d; }

MultiState initial_multi(double tau_R0, double a_R, const std::vector<double>& tau_S0,
                         const std::vector<double>& a, double c, double d) {
    if (tau_S0.empty() || tau_S0.size() != a.size())
        throw Error(ErrorCode::InvalidParams, "need matching, non-empty child clock and rate lists");
    MultiState x;
    x.tau_R = tau_R0;
    x.a_R = a_R;
    x.tau_S = tau_S0;
    x.a = a;
    x.tau = c;
    // The first correction lands one exchange length from now.
    x.tau_cycle.assign(tau_S0.size(), cycle_length(c, d));
    for (std::size_t i = 0; i < tau_S0.size(); ++i)
        x.eps.push_back({tau_R0 - tau_S0[i], a_R - a[i]});
    return x;
}

MultiState advance_multi(const MultiState& state, double delta, double rate_noise) {
    if (!(delta >= 0.0) || delta > state.tau)
        throw Error(ErrorCode::FlowDomainViolation,
                    "delta " + std::to_string(delta) + " outside [0, " + std::to_string(state.tau) + "]");
    MultiState x = state;
    x.tau_R += (x.a_R + rate_noise) * delta;
    for (int i = 0; i < x.n(); ++i) {
        x.tau_S[i] += (x.a[i] + rate_noise) * delta;
        x.tau_cycle[i] -= delta;
        x.eps[i].x1 += x.eps[i].x2 * delta;
    }
    x.tau -= delta;
    return x;
}

namespace {

HybridState pair_view(const MultiState& x) {
    const int k = x.active - 1;
    HybridState h;
    h.tau_i = x.tau_R;
    h.tau_k = x.tau_S[k];
    h.a_i = x.a_R;
    h.a_k = x.a[k];
    h.tau = x.tau;
    h.mem_i = x.mem_R;
    h.mem_k = x.mem_S;
    h.p = x.p;
    h.q = x.q;
    h.eps = x.eps[k];
    return h;
}

} // namespace

MultiState jump_multi(const MultiState& state, double delay_draw, const Params& params) {
    if (state.active < 1 || state.active > state.n())
        throw Error(ErrorCode::CorruptPhase, "active child " + std::to_string(state.active));
    const bool correcting = state.p == 5;
    const HybridState h = apply_jump(pair_view(state), delay_draw, params);
    MultiState x = state;
    const int k = x.active - 1;
    x.tau_R = h.tau_i;
    x.tau_S[k] = h.tau_k;
    x.a[k] = h.a_k;
    x.tau = h.tau;
    x.mem_R = h.mem_i;
    x.mem_S = h.mem_k;
    x.p = h.p;
    x.q = h.q;
    x.eps[k] = h.eps;
    if (correcting) {
        // Nominally every cycle timer expires here; all are re-armed together.
        std::fill(x.tau_cycle.begin(), x.tau_cycle.end(), cycle_length(params.c, params.d));
        x.active = x.active % x.n() + 1;
    }
    return x;
}

MultiTrajectory run_multi(const MultiState& initial, const Params& params, const Horizon& horizon,
                          const NoiseModel& noise, std::uint64_t seed, const RunOptions& opts) {
    MultiTrajectory traj;
    traj.params = params;
    traj.nominal = noise.nominal();
    NoiseStream ns(noise, seed);

    MultiState x = initial;
    double t = 0.0;
    std::int64_t j = 0;
    traj.samples.push_back({{t, j}, x});
    const double slack = std::isfinite(horizon.t_max) ? 1e-9 * std::max(1.0, std::abs(horizon.t_max)) : 0.0;

    auto push_flow = [&](const MultiState& start, double dt, double m) {
        for (int s = 1; s <= opts.flow_substeps; ++s) {
            const double h = dt * s / (opts.flow_substeps + 1);
            traj.samples.push_back({{t + h, j}, advance_multi(start, h, m)});
        }
    };

    while (j < horizon.j_max) {
        const double dt = x.tau;
        const double m = ns.rate();
        if (t + dt > horizon.t_max + slack) {
            const double rest = horizon.t_max - t;
            if (rest > 0.0) {
                push_flow(x, rest, m);
                x = advance_multi(x, rest, m);
                traj.samples.push_back({{horizon.t_max, j}, x});
            }
            break;
        }
        if (dt > 0.0) {
            push_flow(x, dt, m);
            x = advance_multi(x, dt, m);
            t += dt;
            traj.samples.push_back({{t, j}, x});
        }
        const bool transit = x.p == 0 || x.p == 2 || x.p == 4;
        const double delay = transit ? ns.delay(params.d) : params.d;
        x = jump_multi(x, delay, params);
        ++j;
        traj.samples.push_back({{t, j}, x});
    }
    return traj;
}

LmiResult check_lmi_multi(const Matrix2& P, double c, double d, double mu) {
    return check_lmi_at(P, c, d, mu, cycle_length(c, d));
}

double multi_block_value(const Vector2& eps, double tau_cycle, const Matrix2& P) {
    return quad_form(P, exp_af(tau_cycle) * eps);
}

double multi_lyapunov_value(const MultiState& state, const Matrix2& P) {
    double v = 0.0;
    for (int i = 0; i < state.n(); ++i)
        v += multi_block_value(state.eps[i], state.tau_cycle[i], P);
    return v;
}

void annotate_lyapunov(MultiTrajectory& traj, const Matrix2& P) {
    for (MultiSample& s : traj.samples) {
        s.V_child.resize(s.state.n());
        double v = 0.0;
        for (int i = 0; i < s.state.n(); ++i) {
            s.V_child[i] = multi_block_value(s.state.eps[i], s.state.tau_cycle[i], P);
            v += s.V_child[i];
        }
        s.V = v;
    }
}

} // namespace clocksync
