#include "clocksync/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace clocksync {

bool Matrix2::is_symmetric(double tol) const { return std::abs(a12 - a21) <= tol; }

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

Vector2 operator*(const Matrix2& a, const Vector2& v) {
    return {a.a11 * v.x1 + a.a12 * v.x2, a.a21 * v.x1 + a.a22 * v.x2};
}

Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
}

Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
}

Matrix2 operator*(double s, const Matrix2& a) { return {s * a.a11, s * a.a12, s * a.a21, s * a.a22}; }

Vector2 operator+(const Vector2& a, const Vector2& b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
Vector2 operator-(const Vector2& a, const Vector2& b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
Vector2 operator*(double s, const Vector2& v) { return {s * v.x1, s * v.x2}; }

double dot(const Vector2& a, const Vector2& b) { return a.x1 * b.x1 + a.x2 * b.x2; }
double norm(const Vector2& v) { return std::hypot(v.x1, v.x2); }

double quad_form(const Matrix2& m, const Vector2& v) { return dot(v, m * v); }

double max_abs(const Matrix2& m) {
    return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

std::pair<double, double> sym_eigenvalues(const Matrix2& m) {
    const double off = 0.5 * (m.a12 + m.a21);
    const double mean = 0.5 * (m.a11 + m.a22);
    const double rad = std::hypot(0.5 * (m.a11 - m.a22), off);
    double hi = mean + rad;
    double lo = mean - rad;
    // Recover the smaller-magnitude root from the determinant to avoid cancellation.
    const double det = m.a11 * m.a22 - off * off;
    if (mean >= 0.0 && hi != 0.0)
        lo = det / hi;
    else if (mean < 0.0 && lo != 0.0)
        hi = det / lo;
    return {lo, hi};
}

} // namespace clocksync
