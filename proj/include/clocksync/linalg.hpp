#pragma once

#include <utility>

namespace clocksync {

struct Vector2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Row-major 2x2 matrix.
struct Matrix2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Matrix2 symmetric(double p11, double p12, double p22) { return {p11, p12, p12, p22}; }

    bool is_symmetric(double tol = 0.0) const;
    Matrix2 transpose() const { return {a11, a21, a12, a22}; }
};

Matrix2 operator*(const Matrix2& a, const Matrix2& b);
Vector2 operator*(const Matrix2& a, const Vector2& v);
Matrix2 operator+(const Matrix2& a, const Matrix2& b);
Matrix2 operator-(const Matrix2& a, const Matrix2& b);
Matrix2 operator*(double s, const Matrix2& a);
Vector2 operator+(const Vector2& a, const Vector2& b);
Vector2 operator-(const Vector2& a, const Vector2& b);
Vector2 operator*(double s, const Vector2& v);

double dot(const Vector2& a, const Vector2& b);
double norm(const Vector2& v);
double quad_form(const Matrix2& m, const Vector2& v);
double max_abs(const Matrix2& m);

// Eigenvalues of the symmetric part of m, ascending.
std::pair<double, double> sym_eigenvalues(const Matrix2& m);

} // namespace clocksync
