#pragma once

// Hyper-dual numbers a + b e1 + c e2 + d e1 e2 with e1^2 = e2^2 = 0.
// Seeding e1 on u_i and e2 on u_j yields f, f_i, f_j and f_ij exactly.

#include <cmath>

namespace densitylab {

struct HyperDual {
    double v = 0.0;   ///< value
    double d1 = 0.0;  ///< e1 part
    double d2 = 0.0;  ///< e2 part
    double d12 = 0.0; ///< e1 e2 part

    constexpr HyperDual() = default;
    constexpr HyperDual(double x) : v(x) {} // NOLINT: implicit lift of constants
    constexpr HyperDual(double x, double a, double b, double c) : v(x), d1(a), d2(b), d12(c) {}
};

/// Applies a scalar function given f(v), f'(v), f''(v).
[[nodiscard]] constexpr HyperDual chain(const HyperDual& x, double f, double fp, double fpp)
{
    return {f, fp * x.d1, fp * x.d2, fp * x.d12 + fpp * x.d1 * x.d2};
}

constexpr HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
constexpr HyperDual operator+(const HyperDual& a, const HyperDual& b)
{
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}
constexpr HyperDual operator-(const HyperDual& a, const HyperDual& b)
{
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}
constexpr HyperDual operator*(const HyperDual& a, const HyperDual& b)
{
    return {a.v * b.v, a.v * b.d1 + a.d1 * b.v, a.v * b.d2 + a.d2 * b.v,
            a.v * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.v};
}
constexpr HyperDual inverse(const HyperDual& a)
{
    const double i = 1.0 / a.v;
    return chain(a, i, -i * i, 2.0 * i * i * i);
}
constexpr HyperDual operator/(const HyperDual& a, const HyperDual& b) { return a * inverse(b); }

constexpr HyperDual& operator+=(HyperDual& a, const HyperDual& b) { return a = a + b; }
constexpr HyperDual& operator-=(HyperDual& a, const HyperDual& b) { return a = a - b; }
constexpr HyperDual& operator*=(HyperDual& a, const HyperDual& b) { return a = a * b; }

// Mixed double overloads keep template code readable.
constexpr HyperDual operator+(const HyperDual& a, double b) { return {a.v + b, a.d1, a.d2, a.d12}; }
constexpr HyperDual operator+(double a, const HyperDual& b) { return b + a; }
constexpr HyperDual operator-(const HyperDual& a, double b) { return {a.v - b, a.d1, a.d2, a.d12}; }
constexpr HyperDual operator-(double a, const HyperDual& b) { return {a - b.v, -b.d1, -b.d2, -b.d12}; }
constexpr HyperDual operator*(const HyperDual& a, double b) { return {a.v * b, a.d1 * b, a.d2 * b, a.d12 * b}; }
constexpr HyperDual operator*(double a, const HyperDual& b) { return b * a; }
constexpr HyperDual operator/(const HyperDual& a, double b) { return a * (1.0 / b); }
constexpr HyperDual operator/(double a, const HyperDual& b) { return a * inverse(b); }

inline HyperDual sqrt(const HyperDual& x)
{
    const double s = std::sqrt(x.v);
    return chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline HyperDual exp(const HyperDual& x)
{
    const double e = std::exp(x.v);
    return chain(x, e, e, e);
}
inline HyperDual log(const HyperDual& x) { return chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v)); }
inline HyperDual sin(const HyperDual& x)
{
    const double s = std::sin(x.v);
    return chain(x, s, std::cos(x.v), -s);
}
inline HyperDual cos(const HyperDual& x)
{
    const double c = std::cos(x.v);
    return chain(x, c, -std::sin(x.v), -c);
}
inline HyperDual sinh(const HyperDual& x)
{
    const double s = std::sinh(x.v);
    return chain(x, s, std::cosh(x.v), s);
}
inline HyperDual cosh(const HyperDual& x)
{
    const double c = std::cosh(x.v);
    return chain(x, c, std::sinh(x.v), c);
}
inline HyperDual tanh(const HyperDual& x)
{
    const double t = std::tanh(x.v);
    const double s2 = 1.0 - t * t;
    return chain(x, t, s2, -2.0 * t * s2);
}
inline HyperDual atanh(const HyperDual& x)
{
    const double q = 1.0 / ((1.0 - x.v) * (1.0 + x.v));
    return chain(x, std::atanh(x.v), q, 2.0 * x.v * q * q);
}

} // namespace densitylab
