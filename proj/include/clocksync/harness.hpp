#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clocksync/certificate.hpp"
#include "clocksync/multi_agent.hpp"
#include "clocksync/sim_engine.hpp"

namespace clocksync {

enum class Topology { TwoAgent, MultiAgent };

struct ScenarioConfig {
    Topology topology = Topology::TwoAgent;
    // Two-agent nodes.
    double a_i = 1.0, a_k = 1.0;
    double tau_i0 = 0.0, tau_k0 = 0.0;
    // Reference and children.
    double a_R = 1.0, tau_R0 = 0.0;
    std::vector<double> a, tau_S0;

    double c = 0.0, d = 0.0, mu = 0.0;
    Horizon horizon;
    int flow_substeps = 0;
    NoiseModel noise;
    std::uint64_t seed = 0;
    std::optional<std::string> certificate;
    std::optional<std::string> trajectory_out;
    std::optional<std::string> plot_prefix;
};

enum class CheckStatus { Pass, Fail, NotApplicable };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::NotApplicable;
    double worst = 0.0; // worst observed value of the checked quantity
    double limit = 0.0; // pass iff worst <= limit
    std::string detail{};
};

struct VerificationReport {
    CheckResult eps_consistency{"eps_consistency"};
    CheckResult m_membership{"M_membership_after_first_cycle"};
    CheckResult v_flow{"V_flow_behavior"};
    CheckResult v_jump{"V_jump_decrement"};
    CheckResult bound{"bound_envelope"};
    CheckResult terminal{"terminal_error"};

    std::vector<const CheckResult*> checks() const;
    bool ok() const;
    std::string to_string() const;
};

struct ScenarioResult {
    bool multi = false;
    Trajectory traj;
    MultiTrajectory mtraj;
    std::optional<Certificate> cert;
    VerificationReport report;
};

constexpr double kEpsTol = 1e-12;
constexpr double kVFlowTol = 1e-12;
constexpr double kVJumpSlack = 1e-9;

ScenarioConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
ScenarioConfig parse_config(const std::string& path);

ScenarioResult run_scenario(const ScenarioConfig& cfg);
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::optional<Certificate>& cert);

VerificationReport verify_trajectory(const Trajectory& traj, const Certificate* cert);
VerificationReport verify_multi(const MultiTrajectory& traj, const Certificate* cert);

std::string format_double(double v);

std::string trajectory_csv(const Trajectory& traj);
std::string trajectory_csv(const MultiTrajectory& traj);
// Also writes <path>.meta.json with the run parameters.
void write_trajectory(const Trajectory& traj, const std::string& path);
void write_trajectory(const MultiTrajectory& traj, const std::string& path);

bool is_multi_csv(const std::string& path);
Trajectory read_trajectory(const std::string& path);
MultiTrajectory read_multi_trajectory(const std::string& path);

void emit_plot_data(const Trajectory& traj, const std::string& prefix);
void emit_plot_data(const MultiTrajectory& traj, const std::string& prefix);

// Time from (p, q, tau) to the next correction under nominal timing.
double nominal_time_to_correction(int p, double tau, double c, double d);

} // namespace clocksync
