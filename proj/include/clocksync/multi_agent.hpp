#pragma once

#include <vector>

#include "clocksync/certificate.hpp"
#include "clocksync/sim_engine.hpp"

namespace clocksync {

struct MultiState {
    double tau_R = 0.0;
    std::vector<double> tau_S;
    double a_R = 1.0;
    std::vector<double> a;
    double tau = 0.0;
    std::vector<double> tau_cycle;
    TimestampBuffer mem_R{};
    TimestampBuffer mem_S{};
    int active = 1; // 1-based child index
    int p = 0;
    int q = 0;
    std::vector<Vector2> eps;

    int n() const { return static_cast<int>(tau_S.size()); }
};

struct MultiSample {
    HybridTime time;
    MultiState state;
    double V = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> V_child{};
};

struct MultiTrajectory {
    std::vector<MultiSample> samples;
    Params params;
    bool nominal = true;
    // False when loaded from CSV: buffers and rates are not persisted.
    bool has_buffers = true;
};

double cycle_length(double c, double d);

MultiState initial_multi(double tau_R0, double a_R, const std::vector<double>& tau_S0,
                         const std::vector<double>& a, double c, double d);

MultiState advance_multi(const MultiState& state, double delta, double rate_noise = 0.0);
MultiState jump_multi(const MultiState& state, double delay_draw, const Params& params);

MultiTrajectory run_multi(const MultiState& initial, const Params& params, const Horizon& horizon,
                          const NoiseModel& noise, std::uint64_t seed, const RunOptions& opts = {});

LmiResult check_lmi_multi(const Matrix2& P, double c, double d, double mu);

double multi_block_value(const Vector2& eps, double tau_cycle, const Matrix2& P);
double multi_lyapunov_value(const MultiState& state, const Matrix2& P);

// Fills V and V_child on every sample.
void annotate_lyapunov(MultiTrajectory& traj, const Matrix2& P);

} // namespace clocksync
