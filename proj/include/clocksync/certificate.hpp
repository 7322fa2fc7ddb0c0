#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "clocksync/linalg.hpp"

namespace clocksync {

struct Trajectory;

struct LmiResult {
    bool holds = false;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct Certificate {
    double c = 0.0;
    double d = 0.0;
    double mu = 0.0;
    Matrix2 P;
    double sigma = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double rho = 0.0;
    bool contraction_ok = false;
    // Flow time folded into the jump condition: 6d, or 3c+3d for round-robin networks.
    double horizon = 0.0;
};

struct BoundEnvelope {
    double coefficient = 0.0;
    double eta_root = 0.0; // eta^(1/6)
    double rho = 0.0;
};

constexpr double kLmiMargin = 1e-10;

double two_agent_horizon(double d);

// B^T P B - P with B = exp_af(horizon) A_g.
Matrix2 lmi_matrix(const Matrix2& P, double c, double d, double mu, double horizon);

LmiResult check_lmi(const Matrix2& P, double c, double d, double mu);
LmiResult check_lmi_at(const Matrix2& P, double c, double d, double mu, double horizon);

/// Solves B^T P B - P = -q_scale I. Throws Infeasible when the round map is not Schur.
Matrix2 design_p(double c, double d, double mu, double q_scale);
Matrix2 design_p_at(double c, double d, double mu, double q_scale, double horizon);
/// Same with a general symmetric positive definite weight Q in place of q_scale I.
Matrix2 design_p(double c, double d, double mu, const Matrix2& Q);
Matrix2 design_p_at(double c, double d, double mu, const Matrix2& Q, double horizon);

double sigma_of(const Matrix2& P, double c, double d, double mu);
double sigma_at(const Matrix2& P, double c, double d, double mu, double horizon);

std::pair<double, double> alpha_bounds(const Matrix2& P, double c, double d);
double gamma_of(const Matrix2& P, double c, double d);
/// Supremum of (dV/dt)/V over q=0 flows; compare with gamma/alpha2.
double worst_flow_rate(const Matrix2& P, double c, double d);

Certificate assemble_certificate(double c, double d, double mu, const Matrix2& P, double sigma,
                                 double alpha1, double alpha2, double gamma, double horizon);
Certificate convergence_factors(const Matrix2& P, double c, double d, double mu);
Certificate convergence_factors_at(const Matrix2& P, double c, double d, double mu, double horizon);

double lyapunov_r(double tau, int p, int q, double c, double d);
double lyapunov_value(const Vector2& eps, double tau, int p, int q, const Matrix2& P, double c,
                      double d);

BoundEnvelope bound_envelope(const Certificate& cert);
double theoretical_bound(std::int64_t j, double eps0_norm, const Certificate& cert);

// Fills V on every sample.
void annotate_lyapunov(Trajectory& traj, const Matrix2& P);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);
void write_certificate(const Certificate& cert, const std::string& path);
Certificate read_certificate(const std::string& path);

} // namespace clocksync
