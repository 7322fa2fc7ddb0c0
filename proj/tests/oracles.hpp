#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// engine; values come from affine clock arithmetic and explicit 2x2 algebra.

#include <array>
#include <cmath>
#include <random>

#include "clocksync/sim_engine.hpp"

namespace oracle {

struct Exchange {
    // Event instants measured from the send at t0.
    double t[6];
    // Clock readings: i at t0, t3, t4; k at t1, t2, t5.
    double Ti0, Tk1, Tk2, Ti3, Ti4, Tk5;
    double eps_tau_at_t5; // tau_i - tau_k just before the correction
    double eps_a;
};

// Affine clocks tau(t) = a t + tau(0); first send at t0.
inline Exchange exchange(double tau_i0, double tau_k0, double a_i, double a_k, double c, double d,
                         double t0) {
    Exchange e{};
    const double ts[6] = {t0, t0 + d, t0 + c + d, t0 + c + 2 * d, t0 + 2 * c + 2 * d, t0 + 2 * c + 3 * d};
    for (int k = 0; k < 6; ++k)
        e.t[k] = ts[k];
    auto Ti = [&](double t) { return a_i * t + tau_i0; };
    auto Tk = [&](double t) { return a_k * t + tau_k0; };
    e.Ti0 = Ti(ts[0]);
    e.Tk1 = Tk(ts[1]);
    e.Tk2 = Tk(ts[2]);
    e.Ti3 = Ti(ts[3]);
    e.Ti4 = Ti(ts[4]);
    e.Tk5 = Tk(ts[5]);
    e.eps_tau_at_t5 = Ti(ts[5]) - Tk(ts[5]);
    e.eps_a = a_i - a_k;
    return e;
}

// Buffer of node i at the correction instant, m1..m6.
inline clocksync::TimestampBuffer m6_buffer(const Exchange& e) {
    return {e.Ti4, e.Ti3, e.Tk2, e.Tk1, e.Ti0, 0.0};
}

inline double g1(double c, double d) { return (3 * c + 4 * d) / 2; }
inline double g2(double c, double d) { return 2 * (c + d); }

// Eigenvalues of [[a, b], [b, e]], ascending.
inline std::pair<double, double> eig(double a, double b, double e) {
    const double tr = a + e;
    const double det = a * e - b * b;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    return {tr / 2 - disc, tr / 2 + disc};
}

// exp(A_f r)^T P exp(A_f r) written out entrywise.
inline std::array<double, 3> shifted(double p11, double p12, double p22, double r) {
    return {p11, p12 + p11 * r, p22 + 2 * p12 * r + p11 * r * r};
}

// State in M_k (k = 1..6) with unconstrained buffer entries filled randomly.
inline clocksync::HybridState random_in_m(int k, double c, double d, std::mt19937_64& g) {
    std::uniform_real_distribution<double> rate(0.5, 1.5), clock(-10.0, 10.0), junk(-50.0, 50.0), unit(0.0, 1.0);
    clocksync::HybridState x;
    x.a_i = rate(g);
    x.a_k = rate(g);
    x.tau_i = clock(g);
    x.tau_k = clock(g);
    x.p = k - 1;
    x.q = (k == 2 || k == 4 || k == 6) ? 1 : 0;
    const double span = x.q ? d : c;
    x.tau = span * unit(g);
    for (auto& v : x.mem_i)
        v = junk(g);
    for (auto& v : x.mem_k)
        v = junk(g);
    const double el = span - x.tau; // time since the last jump
    auto ri = [&](double b) { return x.tau_i - x.a_i * (el + b); };
    auto rk = [&](double b) { return x.tau_k - x.a_k * (el + b); };
    switch (k) {
    case 2: x.mem_i[0] = ri(0); break;
    case 3: x.mem_k[0] = rk(0); x.mem_k[1] = ri(d); break;
    case 4: x.mem_k[0] = rk(0); x.mem_k[1] = rk(c); x.mem_k[2] = ri(c + d); break;
    case 5: x.mem_i[0] = ri(0); x.mem_i[1] = rk(d); x.mem_i[2] = rk(c + d); x.mem_i[3] = ri(c + 2 * d); break;
    case 6:
        x.mem_i[0] = ri(0); x.mem_i[1] = ri(c); x.mem_i[2] = rk(c + d); x.mem_i[3] = rk(2 * c + d);
        x.mem_i[4] = ri(2 * c + 2 * d);
        break;
    default: break;
    }
    x.eps = {x.tau_i - x.tau_k, x.a_i - x.a_k};
    return x;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

} // namespace oracle
