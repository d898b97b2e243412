// Forward-mode differentiation scalars.
//
// Dual carries one directional derivative; Dual2 is a hyper-dual number
// carrying two first-order seeds and the mixed second-order part, which is
// what a second derivative costs in forward mode (seed d1 = d2 = 1 on the
// same variable and read d12).  Domain checks throw instead of producing
// NaN; derivative rules additionally reject points where the derivative
// itself is singular (sqrt at 0, |x| at 0) even when the value exists.
#pragma once

#include <cmath>
#include <string>

#include "ermakov/errors.hpp"

namespace ermakov {

struct Dual {
    double v = 0.0; // value
    double d = 0.0; // derivative part

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}
    constexpr Dual(double value, double deriv) : v(value), d(deriv) {}
};

struct Dual2 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d12 = 0.0;

    constexpr Dual2() = default;
    constexpr Dual2(double value) : v(value) {}
    constexpr Dual2(double value, double da, double db, double dab)
        : v(value), d1(da), d2(db), d12(dab) {}
};

// ---- arithmetic -----------------------------------------------------------

constexpr Dual operator-(Dual a) { return {-a.v, -a.d}; }
constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
constexpr Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }

inline Dual operator/(Dual a, Dual b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    const double inv = 1.0 / b.v;
    return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
}

constexpr Dual2 operator-(Dual2 a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
constexpr Dual2 operator+(Dual2 a, Dual2 b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}
constexpr Dual2 operator-(Dual2 a, Dual2 b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}
constexpr Dual2 operator*(Dual2 a, Dual2 b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + a.v * b.d2,
            a.d12 * b.v + a.d1 * b.d2 + a.d2 * b.d1 + a.v * b.d12};
}

inline Dual2 operator/(Dual2 a, Dual2 b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    const double q1 = (a.d1 - q * b.d1) * inv;
    const double q2 = (a.d2 - q * b.d2) * inv;
    const double q12 = (a.d12 - q1 * b.d2 - q2 * b.d1 - q * b.d12) * inv;
    return {q, q1, q2, q12};
}

// ---- chain-rule application helpers ---------------------------------------

// Lift a scalar function with known first/second derivative at u.v.
inline Dual apply_unary(Dual u, double f, double df) { return {f, df * u.d}; }
inline Dual2 apply_unary(Dual2 u, double f, double df, double ddf) {
    return {f, df * u.d1, df * u.d2, ddf * u.d1 * u.d2 + df * u.d12};
}

// ---- elementary functions --------------------------------------------------

inline Dual sin(Dual u) { return apply_unary(u, std::sin(u.v), std::cos(u.v)); }
inline Dual cos(Dual u) { return apply_unary(u, std::cos(u.v), -std::sin(u.v)); }
inline Dual exp(Dual u) { const double e = std::exp(u.v); return apply_unary(u, e, e); }

inline Dual log(Dual u) {
    if (u.v <= 0.0) throw DomainError("ln of non-positive value");
    return apply_unary(u, std::log(u.v), 1.0 / u.v);
}

inline Dual sqrt(Dual u) {
    if (u.v < 0.0) throw DomainError("sqrt of negative value");
    if (u.v == 0.0) throw DomainError("derivative of sqrt is singular at 0");
    const double r = std::sqrt(u.v);
    return apply_unary(u, r, 0.5 / r);
}

inline Dual abs(Dual u) {
    if (u.v == 0.0) throw DomainError("derivative of abs is singular at 0");
    return apply_unary(u, std::fabs(u.v), u.v > 0.0 ? 1.0 : -1.0);
}

inline Dual tanh(Dual u) {
    const double th = std::tanh(u.v);
    return apply_unary(u, th, 1.0 - th * th);
}

inline Dual2 sin(Dual2 u) { return apply_unary(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
inline Dual2 cos(Dual2 u) { return apply_unary(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }
inline Dual2 exp(Dual2 u) { const double e = std::exp(u.v); return apply_unary(u, e, e, e); }

inline Dual2 log(Dual2 u) {
    if (u.v <= 0.0) throw DomainError("ln of non-positive value");
    const double inv = 1.0 / u.v;
    return apply_unary(u, std::log(u.v), inv, -inv * inv);
}

inline Dual2 sqrt(Dual2 u) {
    if (u.v < 0.0) throw DomainError("sqrt of negative value");
    if (u.v == 0.0) throw DomainError("derivative of sqrt is singular at 0");
    const double r = std::sqrt(u.v);
    return apply_unary(u, r, 0.5 / r, -0.25 / (r * u.v));
}

inline Dual2 abs(Dual2 u) {
    if (u.v == 0.0) throw DomainError("derivative of abs is singular at 0");
    const double s = u.v > 0.0 ? 1.0 : -1.0;
    return apply_unary(u, std::fabs(u.v), s, 0.0);
}

inline Dual2 tanh(Dual2 u) {
    const double th = std::tanh(u.v);
    const double sech2 = 1.0 - th * th;
    return apply_unary(u, th, sech2, -2.0 * th * sech2);
}

// ---- power -----------------------------------------------------------------
//
// Shared by plain and dual evaluation.  Negative bases are allowed only with
// an exponent that carries no derivative seeds and has an integer value;
// base 0 needs a positive exponent (0^0 := 1, matching std::pow).

namespace detail {

inline bool is_integer(double x) { return std::floor(x) == x && std::isfinite(x); }

inline double pow_value(double base, double expo) {
    if (base < 0.0 && !is_integer(expo))
        throw DomainError("fractional power of a negative base");
    if (base == 0.0 && expo < 0.0) throw DomainError("zero raised to a negative power");
    return std::pow(base, expo);
}

} // namespace detail

inline double pow(double base, double expo) { return detail::pow_value(base, expo); }

inline Dual pow(Dual a, Dual b) {
    const bool const_expo = (b.d == 0.0);
    if (const_expo) {
        if (b.v == 0.0) return {1.0, 0.0}; // x^0 is the constant 1
        const double f = detail::pow_value(a.v, b.v);
        const double df = b.v * detail::pow_value(a.v, b.v - 1.0);
        return apply_unary(a, f, df);
    }
    if (a.v <= 0.0) throw DomainError("variable exponent requires a positive base");
    const double f = std::pow(a.v, b.v);
    const double lg = std::log(a.v);
    return {f, f * (b.v * a.d / a.v + lg * b.d)};
}

inline Dual2 pow(Dual2 a, Dual2 b) {
    const bool const_expo = (b.d1 == 0.0 && b.d2 == 0.0 && b.d12 == 0.0);
    if (const_expo) {
        if (b.v == 0.0) return {1.0, 0.0, 0.0, 0.0};
        const double f = detail::pow_value(a.v, b.v);
        const double df = b.v * detail::pow_value(a.v, b.v - 1.0);
        const double ddf =
            (b.v == 1.0) ? 0.0 : b.v * (b.v - 1.0) * detail::pow_value(a.v, b.v - 2.0);
        return apply_unary(a, f, df, ddf);
    }
    if (a.v <= 0.0) throw DomainError("variable exponent requires a positive base");
    return exp(b * log(a));
}

} // namespace ermakov
