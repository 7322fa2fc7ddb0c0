#pragma once

#include "clocksync/linalg.hpp"

namespace clocksync {

// Offset and rate coefficients of the corrected error after one exchange.
double gamma1(double c, double d);
double gamma2(double c, double d);

// Throws InvalidParams unless 0 < c <= d and mu > 0.
void check_params(double c, double d, double mu);

/// exp(A_f t) for A_f = [[0,1],[0,0]].
Matrix2 exp_af(double t);

Matrix2 a_g(double c, double d, double mu);

/// Error after one full exchange, measured between consecutive corrections.
Vector2 round_map(const Vector2& eps, double c, double d, double mu);

double spectral_radius_round(double c, double d, double mu);

} // namespace clocksync
