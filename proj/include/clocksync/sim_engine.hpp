#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "clocksync/linalg.hpp"
#include "clocksync/noise.hpp"
#include "clocksync/sync_laws.hpp"

namespace clocksync {

struct Params {
    double c = 0.0;
    double d = 0.0;
    double mu = 0.0;
};

struct HybridState {
    double tau_i = 0.0;
    double tau_k = 0.0;
    double a_i = 1.0;
    double a_k = 1.0;
    double tau = 0.0;
    TimestampBuffer mem_i{};
    TimestampBuffer mem_k{};
    int p = 0;
    int q = 0;
    Vector2 eps{};
};

struct HybridTime {
    double t = 0.0;
    std::int64_t j = 0;
};

struct Horizon {
    double t_max = std::numeric_limits<double>::infinity();
    std::int64_t j_max = 600;
};

struct Sample {
    HybridTime time;
    HybridState state;
    double V = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
    std::vector<Sample> samples;
    Params params;
    bool nominal = true;
    // False when loaded from CSV: buffers are not persisted.
    bool has_buffers = true;
};

struct RunOptions {
    // Interior samples recorded inside each flow interval.
    int flow_substeps = 0;
};

constexpr double kTolMem = 1e-9;

// Point of M1: p=0, q=0, tau=c, zeroed buffers.
HybridState initial_state(double tau_i0, double tau_k0, double a_i, double a_k, double c);

HybridState advance_flow(const HybridState& state, double delta, double rate_noise = 0.0);
HybridState apply_jump(const HybridState& state, double delay_draw, const Params& params);
double next_event(const HybridState& state);

double rho_i(const HybridState& x, double beta, double c, double d);
double rho_k(const HybridState& x, double beta, double c, double d);

/// Returns k in 1..6 for the matching M_k, or nullopt.
std::optional<int> memory_class(const HybridState& state, double c, double d);

Trajectory run(const HybridState& initial, const Params& params, const Horizon& horizon,
               const NoiseModel& noise, std::uint64_t seed, const RunOptions& opts = {});

} // namespace clocksync
