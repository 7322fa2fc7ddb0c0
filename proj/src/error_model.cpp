#include "clocksync/error_model.hpp"

#include <cmath>
#include <string>

#include "clocksync/errors.hpp"

namespace clocksync {

double gamma1(double c, double d) { return 0.5 * (3.0 * c + 4.0 * d); }
double gamma2(double c, double d) { return 2.0 * (c + d); }

void check_params(double c, double d, double mu) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw Error(ErrorCode::InvalidParams, "c must be positive, got " + std::to_string(c));
    if (!(d >= c) || !std::isfinite(d))
        throw Error(ErrorCode::InvalidParams, "c <= d violated");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw Error(ErrorCode::InvalidParams, "mu must be positive, got " + std::to_string(mu));
}

Matrix2 exp_af(double t) { return {1.0, t, 0.0, 1.0}; }

Matrix2 a_g(double c, double d, double mu) {
    check_params(c, d, mu);
    return {0.0, gamma1(c, d), 0.0, 1.0 - mu * gamma2(c, d)};
}

Vector2 round_map(const Vector2& eps, double c, double d, double mu) { return a_g(c, d, mu) * eps; }

double spectral_radius_round(double c, double d, double mu) {
    check_params(c, d, mu);
    return std::abs(1.0 - mu * gamma2(c, d));
}

} // namespace clocksync
