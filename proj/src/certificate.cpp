#include "clocksync/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clocksync/error_model.hpp"
#include "clocksync/errors.hpp"
#include "clocksync/sim_engine.hpp"

namespace clocksync {

namespace {

void require_spd(const Matrix2& P) {
    const double scale = std::max(1.0, max_abs(P));
    if (!P.is_symmetric(1e-12 * scale))
        throw Error(ErrorCode::InvalidCertificateInput, "P is not symmetric");
    if (!(sym_eigenvalues(P).first > 0.0))
        throw Error(ErrorCode::InvalidCertificateInput, "P is not positive definite");
}

Matrix2 round_operator(double c, double d, double mu, double horizon) {
    return exp_af(horizon) * a_g(c, d, mu);
}

} // namespace

double two_agent_horizon(double d) { return 6.0 * d; }

Matrix2 lmi_matrix(const Matrix2& P, double c, double d, double mu, double horizon) {
    const Matrix2 B = round_operator(c, d, mu, horizon);
    return B.transpose() * P * B - P;
}

LmiResult check_lmi_at(const Matrix2& P, double c, double d, double mu, double horizon) {
    check_params(c, d, mu);
    require_spd(P);
    const auto [lo, hi] = sym_eigenvalues(lmi_matrix(P, c, d, mu, horizon));
    return {hi < -kLmiMargin, lo, hi};
}

LmiResult check_lmi(const Matrix2& P, double c, double d, double mu) {
    return check_lmi_at(P, c, d, mu, two_agent_horizon(d));
}

Matrix2 design_p_at(double c, double d, double mu, const Matrix2& Q, double horizon) {
    check_params(c, d, mu);
    if (!Q.is_symmetric(0.0) || !(sym_eigenvalues(Q).first > 0.0))
        throw Error(ErrorCode::InvalidParams, "weight must be symmetric positive definite");
    const double radius = spectral_radius_round(c, d, mu);
    // The boundary gain 2/gamma2 lands within a few ulp of radius 1.
    if (radius >= 1.0 - 1e-12)
        throw Error(ErrorCode::Infeasible,
                    "round map spectral radius " + std::to_string(radius) + " >= 1");

    // Unknowns (p11, p12, p22) of B^T P B - P = -Q.
    const Matrix2 B = round_operator(c, d, mu, horizon);
    const double b11 = B.a11, b12 = B.a12, b21 = B.a21, b22 = B.a22;
    const double A[3][3] = {
        {b11 * b11 - 1.0, 2.0 * b11 * b21, b21 * b21},
        {b11 * b12, b11 * b22 + b21 * b12 - 1.0, b21 * b22},
        {b12 * b12, 2.0 * b12 * b22, b22 * b22 - 1.0},
    };
    const double rhs[3] = {-Q.a11, -Q.a12, -Q.a22};
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double det = det3(A);
    if (det == 0.0)
        throw Error(ErrorCode::Infeasible, "singular Lyapunov system");
    double sol[3];
    for (int k = 0; k < 3; ++k) {
        double Ak[3][3];
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
                Ak[r][s] = s == k ? rhs[r] : A[r][s];
        sol[k] = det3(Ak) / det;
    }
    const Matrix2 P = Matrix2::symmetric(sol[0], sol[1], sol[2]);
    if (!(sym_eigenvalues(P).first > 0.0))
        throw Error(ErrorCode::Infeasible, "solution is not positive definite");
    return P;
}

Matrix2 design_p_at(double c, double d, double mu, double q_scale, double horizon) {
    if (!(q_scale > 0.0))
        throw Error(ErrorCode::InvalidParams, "q_scale must be positive");
    return design_p_at(c, d, mu, Matrix2::symmetric(q_scale, 0.0, q_scale), horizon);
}

Matrix2 design_p(double c, double d, double mu, double q_scale) {
    return design_p_at(c, d, mu, q_scale, two_agent_horizon(d));
}

Matrix2 design_p(double c, double d, double mu, const Matrix2& Q) {
    return design_p_at(c, d, mu, Q, two_agent_horizon(d));
}

double sigma_at(const Matrix2& P, double c, double d, double mu, double horizon) {
    const LmiResult r = check_lmi_at(P, c, d, mu, horizon);
    if (!r.holds)
        throw Error(ErrorCode::NoCertificate, "jump condition fails, lambda_max = " +
                                                  std::to_string(r.lambda_max));
    return -r.lambda_max;
}

double sigma_of(const Matrix2& P, double c, double d, double mu) {
    return sigma_at(P, c, d, mu, two_agent_horizon(d));
}

double lyapunov_r(double tau, int p, int q, double c, double d) {
    const double h = 1.0 + (1 - q) * (d - c) / c;
    return tau * h + d * (5 - p);
}

std::pair<double, double> alpha_bounds(const Matrix2& P, double c, double d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double taus[3] = {0.0, c, d};
    for (int q = 0; q <= 1; ++q) {
        const double cap = q == 0 ? c : d;
        for (int p = 0; p <= 5; ++p) {
            for (double tau : taus) {
                if (tau > cap)
                    continue;
                const Matrix2 E = exp_af(lyapunov_r(tau, p, q, c, d));
                const auto [l, h] = sym_eigenvalues(E.transpose() * P * E);
                lo = std::min(lo, l);
                hi = std::max(hi, h);
            }
        }
    }
    return {lo, hi};
}

double gamma_of(const Matrix2& P, double c, double d) {
    const double alpha = 2.0 * (c - d) / c;
    if (alpha == 0.0)
        return 0.0;
    const double p11 = P.a11;
    const double beta = 6.0 * d * p11 - P.a12;
    const double eps_star = (beta + std::sqrt(beta * beta + p11 * p11)) / p11;
    return std::abs(alpha) * p11 * eps_star / 2.0;
}

double worst_flow_rate(const Matrix2& P, double c, double d) {
    // Along q=0 flows dV/dt = alpha z^T S z with z = exp_af(r) eps and S = sym(P A_f).
    const double alpha = 2.0 * (c - d) / c;
    if (alpha == 0.0)
        return 0.0;
    const Matrix2 S = Matrix2::symmetric(0.0, alpha * P.a11 / 2.0, alpha * P.a12);
    // Largest root of det(S - l P) = 0.
    const double a = P.a11 * P.a22 - P.a12 * P.a12;
    const double b = -(S.a11 * P.a22 + S.a22 * P.a11 - 2.0 * S.a12 * P.a12);
    const double k = S.a11 * S.a22 - S.a12 * S.a12;
    return (-b + std::sqrt(b * b - 4.0 * a * k)) / (2.0 * a);
}

Certificate assemble_certificate(double c, double d, double mu, const Matrix2& P, double sigma,
                                 double alpha1, double alpha2, double gamma, double horizon) {
    Certificate cert;
    cert.c = c;
    cert.d = d;
    cert.mu = mu;
    cert.P = P;
    cert.sigma = sigma;
    cert.alpha1 = alpha1;
    cert.alpha2 = alpha2;
    cert.gamma = gamma;
    cert.horizon = horizon;
    cert.eta = std::abs(1.0 - sigma / alpha2);
    cert.rho = std::exp(gamma * c / (2.0 * alpha2));
    cert.contraction_ok = std::pow(cert.eta, 1.0 / 6.0) * cert.rho < 1.0;
    return cert;
}

Certificate convergence_factors_at(const Matrix2& P, double c, double d, double mu, double horizon) {
    const double sigma = sigma_at(P, c, d, mu, horizon);
    const auto [a1, a2] = alpha_bounds(P, c, d);
    return assemble_certificate(c, d, mu, P, sigma, a1, a2, gamma_of(P, c, d), horizon);
}

Certificate convergence_factors(const Matrix2& P, double c, double d, double mu) {
    return convergence_factors_at(P, c, d, mu, two_agent_horizon(d));
}

double lyapunov_value(const Vector2& eps, double tau, int p, int q, const Matrix2& P, double c,
                      double d) {
    const Vector2 z = exp_af(lyapunov_r(tau, p, q, c, d)) * eps;
    return quad_form(P, z);
}

BoundEnvelope bound_envelope(const Certificate& cert) {
    return {std::sqrt(cert.alpha2 / cert.alpha1 * std::exp(cert.gamma * cert.c / cert.alpha2)),
            std::pow(cert.eta, 1.0 / 6.0), cert.rho};
}

double theoretical_bound(std::int64_t j, double eps0_norm, const Certificate& cert) {
    if (!cert.contraction_ok)
        throw Error(ErrorCode::NoCertificate, "contraction condition not met");
    const BoundEnvelope env = bound_envelope(cert);
    const double jd = static_cast<double>(j);
    const double log_decay = jd / 6.0 * std::log(cert.eta) + jd * std::log(cert.rho);
    return env.coefficient * std::exp(0.5 * log_decay) * eps0_norm;
}

void annotate_lyapunov(Trajectory& traj, const Matrix2& P) {
    for (Sample& s : traj.samples)
        s.V = lyapunov_value(s.state.eps, s.state.tau, s.state.p, s.state.q, P, traj.params.c,
                             traj.params.d);
}

std::string certificate_to_json(const Certificate& cert) {
    nlohmann::ordered_json j;
    j["c"] = cert.c;
    j["d"] = cert.d;
    j["mu"] = cert.mu;
    j["P"] = {cert.P.a11, cert.P.a12, cert.P.a21, cert.P.a22};
    j["sigma"] = cert.sigma;
    j["alpha1"] = cert.alpha1;
    j["alpha2"] = cert.alpha2;
    j["gamma"] = cert.gamma;
    j["eta"] = cert.eta;
    j["rho"] = cert.rho;
    j["contraction_ok"] = cert.contraction_ok;
    j["horizon"] = cert.horizon;
    return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        Certificate cert;
        cert.c = j.at("c").get<double>();
        cert.d = j.at("d").get<double>();
        cert.mu = j.at("mu").get<double>();
        const auto P = j.at("P").get<std::vector<double>>();
        if (P.size() != 4)
            throw Error(ErrorCode::InvalidCertificateInput, "P must have 4 entries");
        cert.P = {P[0], P[1], P[2], P[3]};
        cert.sigma = j.at("sigma").get<double>();
        cert.alpha1 = j.at("alpha1").get<double>();
        cert.alpha2 = j.at("alpha2").get<double>();
        cert.gamma = j.at("gamma").get<double>();
        cert.eta = j.at("eta").get<double>();
        cert.rho = j.at("rho").get<double>();
        cert.contraction_ok = j.at("contraction_ok").get<bool>();
        cert.horizon = j.value("horizon", two_agent_horizon(cert.d));
        return cert;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidCertificateInput, e.what());
    }
}

void write_certificate(const Certificate& cert, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out << certificate_to_json(cert);
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path);
}

Certificate read_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().empty())
        throw Error(ErrorCode::IoError, "empty file " + path);
    return certificate_from_json(ss.str());
}

} // namespace clocksync
