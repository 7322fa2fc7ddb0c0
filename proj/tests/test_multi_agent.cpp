#include <doctest.h>

#include <cmath>
#include <random>

#include "clocksync/error_model.hpp"
#include "clocksync/errors.hpp"
#include "clocksync/multi_agent.hpp"
#include "oracles.hpp"

using namespace clocksync;

namespace {

const Params kEx4{0.1, 0.2, 0.833};

MultiState to_correction(MultiState x, const Params& prm) {
    do {
        x = jump_multi(advance_multi(x, x.tau), prm.d, prm);
    } while (x.p != 5);
    return advance_multi(x, x.tau);
}

bool is_correction(const MultiTrajectory& tr, std::size_t k) {
    return k > 0 && tr.samples[k].time.j != tr.samples[k - 1].time.j && tr.samples[k - 1].state.p == 5;
}

} // namespace

TEST_CASE("advance_multi is componentwise") {
    MultiState x = initial_multi(1.0, 1.0, {2.0, -1.0}, {0.9, 1.1}, kEx4.c, kEx4.d);
    const MultiState y = advance_multi(x, 0.1);
    CHECK(y.tau_R == doctest::Approx(1.1));
    CHECK(y.tau_S[0] == doctest::Approx(2.09));
    CHECK(y.tau_S[1] == doctest::Approx(-0.89));
    CHECK(y.tau_cycle[0] == doctest::Approx(0.9 - 0.1));
    CHECK(y.tau_cycle[1] == doctest::Approx(0.9 - 0.1));
    CHECK(y.tau == doctest::Approx(0.0).epsilon(1e-15));
    for (int i = 0; i < 2; ++i) {
        CHECK(y.eps[i].x1 == doctest::Approx(y.tau_R - y.tau_S[i]).epsilon(1e-14));
        CHECK(y.eps[i].x2 == doctest::Approx(y.a_R - y.a[i]).epsilon(1e-14));
    }
    const MultiState z = advance_multi(x, 0.0);
    CHECK(z.tau_R == x.tau_R);
    CHECK(z.tau_S == x.tau_S);
    CHECK(z.tau_cycle == x.tau_cycle);
    try {
        advance_multi(x, 0.2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FlowDomainViolation);
    }
}

TEST_CASE("round-robin index and zero-padded correction") {
    MultiState x = initial_multi(0.0, 1.0, {1.0, 2.0}, {1.3, 0.7}, kEx4.c, kEx4.d);
    x = to_correction(x, kEx4);
    CHECK(x.active == 1);
    CHECK(std::abs(x.tau_cycle[0]) <= 1e-12);
    const Vector2 other = x.eps[1];
    const double other_clock = x.tau_S[1];
    MultiState y = jump_multi(x, kEx4.d, kEx4);
    CHECK(y.active == 2);
    CHECK(y.tau_cycle[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(y.eps[1].x1 == other.x1);
    CHECK(y.eps[1].x2 == other.x2);
    CHECK(y.tau_S[1] == other_clock);
    y = to_correction(y, kEx4);
    CHECK(std::abs(y.tau_cycle[1]) <= 1e-12);
    y = jump_multi(y, kEx4.d, kEx4);
    CHECK(y.active == 1);
}

TEST_CASE("jump_multi guards") {
    MultiState x = initial_multi(0.0, 1.0, {1.0}, {1.0}, kEx4.c, kEx4.d);
    try {
        jump_multi(x, kEx4.d, kEx4);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInJumpSet);
    }
    x.tau = 0.0;
    x.active = 3;
    try {
        jump_multi(x, kEx4.d, kEx4);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptPhase);
    }
}

TEST_CASE("three-node network converges") {
    std::mt19937_64 g(44);
    std::uniform_real_distribution<double> rate(0.5, 1.5), off(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const MultiState x0 = initial_multi(off(g), rate(g), {off(g), off(g)}, {rate(g), rate(g)}, kEx4.c, kEx4.d);
        const MultiTrajectory tr = run_multi(x0, kEx4, {std::numeric_limits<double>::infinity(), 6 * 2 * 40}, {}, 0);
        const MultiState& last = tr.samples.back().state;
        for (int i = 0; i < 2; ++i)
            CHECK(norm(last.eps[i]) <= 1e-6);
    }
}

TEST_CASE("one child reduces to the two-agent engine") {
    const Params prm{0.2, 0.5, 0.3571};
    const Trajectory two = run(initial_state(0.7, -1.2, 1.1, 0.75, prm.c), prm, {}, {}, 3, {2});
    const MultiTrajectory one = run_multi(initial_multi(0.7, 1.1, {-1.2}, {0.75}, prm.c, prm.d), prm, {}, {}, 3, {2});
    REQUIRE(two.samples.size() == one.samples.size());
    for (std::size_t k = 0; k < two.samples.size(); ++k) {
        const HybridState& a = two.samples[k].state;
        const MultiState& b = one.samples[k].state;
        CHECK(two.samples[k].time.t == one.samples[k].time.t);
        CHECK(two.samples[k].time.j == one.samples[k].time.j);
        CHECK(std::abs(a.tau_i - b.tau_R) <= 1e-12);
        CHECK(std::abs(a.tau_k - b.tau_S[0]) <= 1e-12);
        CHECK(std::abs(a.a_k - b.a[0]) <= 1e-12);
        CHECK(std::abs(a.eps.x1 - b.eps[0].x1) <= 1e-12);
        CHECK(std::abs(a.eps.x2 - b.eps[0].x2) <= 1e-12);
        CHECK(a.p == b.p);
        CHECK(a.q == b.q);
    }
}

TEST_CASE("zero errors stay at rounding level in the network") {
    const MultiTrajectory tr = run_multi(initial_multi(3.0, 1.2, {3.0, 3.0, 3.0}, {1.2, 1.2, 1.2}, kEx4.c, kEx4.d),
                                         kEx4, {}, {}, 0, {1});
    for (const MultiSample& s : tr.samples)
        for (const Vector2& e : s.state.eps) {
            CHECK(std::abs(e.x1) < 1e-13);
            CHECK(std::abs(e.x2) < 1e-13);
        }
}

TEST_CASE("network jump condition") {
    const Matrix2 P = Matrix2::symmetric(5.435, 1.041, 16.0982);
    const LmiResult a = check_lmi(P, 0.5, 0.5, 0.3);
    const LmiResult b = check_lmi_multi(P, 0.5, 0.5, 0.3);
    CHECK(a.holds == b.holds);
    CHECK(a.lambda_max == b.lambda_max);

    const Matrix2 Pm = design_p_at(0.1, 0.2, 0.833, 1.0, 0.9);
    CHECK(check_lmi_multi(Pm, 0.1, 0.2, 0.833).holds);
    CHECK(max_abs(lmi_matrix(Pm, 0.1, 0.2, 0.833, 0.9) + Matrix2::identity()) <= 1e-10);
    CHECK(!check_lmi_multi(Pm, 0.1, 0.2, 2.2 / oracle::g2(0.1, 0.2)).holds);
}

TEST_CASE("per-child round map and fairness") {
    const int N = 3;
    const double T = cycle_length(kEx4.c, kEx4.d);
    const MultiState x0 = initial_multi(0.0, 1.0, {1.0, -2.0, 0.5}, {1.3, 0.6, 1.45}, kEx4.c, kEx4.d);
    const MultiTrajectory tr = run_multi(x0, kEx4, {std::numeric_limits<double>::infinity(), 6 * N * 6}, {}, 0);
    std::vector<int> order;
    std::vector<std::optional<Vector2>> last(N);
    const double lam = 1 - kEx4.mu * oracle::g2(kEx4.c, kEx4.d);
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        if (!is_correction(tr, k))
            continue;
        const int i = tr.samples[k - 1].state.active - 1;
        order.push_back(i);
        const Vector2 now = tr.samples[k].state.eps[i];
        if (last[i]) {
            // Post-correction to post-correction: flow N*T, then the jump matrix.
            const Vector2 e = *last[i];
            const Vector2 pre{e.x1 + N * T * e.x2, e.x2};
            const Vector2 want{oracle::g1(kEx4.c, kEx4.d) * pre.x2, lam * pre.x2};
            CHECK(now.x1 == doctest::Approx(want.x1).epsilon(1e-9));
            CHECK(now.x2 == doctest::Approx(want.x2).epsilon(1e-9));
        }
        last[i] = now;
    }
    REQUIRE(order.size() >= static_cast<std::size_t>(3 * N));
    for (std::size_t w = 0; w + N <= order.size(); ++w) {
        std::vector<int> seen(N, 0);
        for (int k = 0; k < N; ++k)
            seen[order[w + k]]++;
        for (int v : seen)
            CHECK(v == 1);
    }
}

TEST_CASE("network V: constant on flows, block decrement at corrections") {
    const Matrix2 P = design_p_at(kEx4.c, kEx4.d, kEx4.mu, 1.0, cycle_length(kEx4.c, kEx4.d));
    const double sigma = -check_lmi_multi(P, kEx4.c, kEx4.d, kEx4.mu).lambda_max;
    MultiTrajectory tr = run_multi(initial_multi(0.0, 1.0, {1.0, -2.0}, {1.3, 0.6}, kEx4.c, kEx4.d), kEx4,
                                   {std::numeric_limits<double>::infinity(), 120}, {}, 0, {3});
    annotate_lyapunov(tr, P);
    int corrections = 0;
    for (std::size_t k = 1; k < tr.samples.size(); ++k) {
        const MultiSample& a = tr.samples[k - 1];
        const MultiSample& b = tr.samples[k];
        if (a.time.j == b.time.j) {
            CHECK(std::abs(b.V - a.V) <= 1e-12);
        } else if (a.state.p == 5) {
            const int i = a.state.active - 1;
            CHECK(std::abs(a.state.tau_cycle[i]) <= 1e-12);
            const double e = norm(a.state.eps[i]);
            CHECK(b.V_child[i] - a.V_child[i] <= -sigma * e * e + 1e-9);
            ++corrections;
        } else {
            CHECK(std::abs(b.V - a.V) <= 1e-12);
        }
    }
    CHECK(corrections == 20);
}
