#pragma once

// Model-space functions of the simply connected space form of curvature -k <= 0.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "densitylab/errors.hpp"
#include "densitylab/grid.hpp"
#include "densitylab/quadrature.hpp"

namespace densitylab {

struct SpaceFormParams {
    int m = 2;      ///< intrinsic dimension
    int n = 3;      ///< ambient dimension
    double k = 0.0; ///< ambient curvature is -k

    void validate() const
    {
        if (m < 2) throw ConfigError("space form: m must be >= 2");
        if (n < m + 1) throw ConfigError("space form: n must be >= m+1");
        if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("space form: k must be finite and >= 0");
    }

    [[nodiscard]] static SpaceFormParams make(int m, int n, double k)
    {
        SpaceFormParams p{m, n, k};
        p.validate();
        return p;
    }

    friend bool operator==(const SpaceFormParams&, const SpaceFormParams&) = default;
};

/// Below this value of sqrt(k)*s the ratio functions switch to Taylor series.
inline constexpr double kSeriesThreshold = 2e-2;
/// Relative tolerance used for V_k and f when no closed form applies.
inline constexpr double kModelQuadTol = 1e-13;

namespace detail {

inline void require_nonneg(double t, const char* what)
{
    if (!(t >= 0.0) || std::isnan(t)) throw DomainError(std::string(what) + ": argument must be >= 0");
}

inline void require_pos(double s, const char* what)
{
    if (!(s > 0.0)) throw DomainError(std::string(what) + ": argument must be > 0");
}

// sinh(a)/sinh(b) for 0 <= a <= b without overflow.
inline double sinh_ratio(double a, double b)
{
    if (b < 20.0) return std::sinh(a) / std::sinh(b);
    return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

// z(s) expansion in x = sqrt(k) s, through x^8.
inline double z_series(double x, int mi)
{
    const double m = mi;
    const double x2 = x * x;
    const double c2 = 1.0 / (m + 2.0);
    const double c4 = -(2.0 * m - 1.0) / (3.0 * (m + 2.0) * (m + 4.0));
    const double c6 = (17.0 * m * m - 10.0 * m + 3.0) / (45.0 * (m + 2.0) * (m + 4.0) * (m + 6.0));
    const double c8 = -(62.0 * m * m * m - 18.0 * m * m + 22.0 * m - 3.0)
        / (315.0 * (m + 2.0) * (m + 4.0) * (m + 6.0) * (m + 8.0));
    return x2 * (c2 + x2 * (c4 + x2 * (c6 + x2 * c8)));
}

} // namespace detail

/// sn_k(t): t for k = 0, sinh(sqrt(k) t)/sqrt(k) otherwise.
[[nodiscard]] inline double sn(double t, double k)
{
    detail::require_nonneg(t, "sn");
    detail::require_nonneg(k, "sn");
    if (k == 0.0) return t;
    const double rk = std::sqrt(k);
    return std::sinh(rk * t) / rk;
}

/// sn_k'(t) = cosh(sqrt(k) t).
[[nodiscard]] inline double cn(double t, double k)
{
    detail::require_nonneg(t, "cn");
    detail::require_nonneg(k, "cn");
    if (k == 0.0) return 1.0;
    return std::cosh(std::sqrt(k) * t);
}

/// sn_k'/sn_k, stable for large arguments.
[[nodiscard]] inline double cn_over_sn(double t, double k)
{
    detail::require_pos(t, "cn_over_sn");
    detail::require_nonneg(k, "cn_over_sn");
    if (k == 0.0) return 1.0 / t;
    const double rk = std::sqrt(k);
    return rk / std::tanh(rk * t);
}

/// Area of the unit sphere S^{m-1} in R^m.
[[nodiscard]] inline double unit_sphere_area(int m)
{
    if (m < 1) throw DomainError("unit_sphere_area: m must be >= 1");
    const double h = 0.5 * m;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// v_k(s): area of the geodesic sphere of radius s in the m-dimensional model.
[[nodiscard]] inline double sphere_volume(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "sphere_volume");
    return unit_sphere_area(p.m) * std::pow(sn(s, p.k), p.m - 1);
}

/// v_k'(s).
[[nodiscard]] inline double sphere_volume_d1(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "sphere_volume_d1");
    const double w = sn(s, p.k);
    return unit_sphere_area(p.m) * (p.m - 1) * std::pow(w, p.m - 2) * cn(s, p.k);
}

/// v_k''(s).
[[nodiscard]] inline double sphere_volume_d2(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "sphere_volume_d2");
    const double w = sn(s, p.k), c = cn(s, p.k);
    double acc = p.k * std::pow(w, p.m - 1);
    if (p.m > 2) acc += (p.m - 2) * std::pow(w, p.m - 3) * c * c;
    return unit_sphere_area(p.m) * (p.m - 1) * acc;
}

/// V_k(s)/v_k(s), evaluated without forming either factor.
[[nodiscard]] inline double volume_ratio(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "volume_ratio");
    const int m = p.m;
    if (p.k == 0.0) return s / m;
    const double rk = std::sqrt(p.k);
    const double x = rk * s;
    if (x < kSeriesThreshold) return (1.0 + detail::z_series(x, m)) * std::tanh(x) / (m * rk);
    switch (m) {
    case 2:
        return std::tanh(0.5 * x) / rk;
    case 3: {
        const double sh = std::sinh(x);
        const double tail = (x < 350.0) ? x / (sh * sh) : 0.0;
        return 0.5 * (1.0 / std::tanh(x) - tail) / rk;
    }
    case 4: {
        const double th = std::tanh(0.5 * x);
        const double inv_sh = (x < 700.0) ? 1.0 / std::sinh(x) : 0.0;
        return th * th * (1.0 / std::tanh(x) + 2.0 * inv_sh) / (3.0 * rk);
    }
    default: {
        auto f = [&](double sig) {
            if (sig <= 0.0) return 0.0;
            return std::pow(detail::sinh_ratio(rk * sig, x), m - 1);
        };
        return integrate_gk(f, 0.0, s, kModelQuadTol).value;
    }
    }
}

/// V_k(s): volume of the geodesic ball of radius s.
[[nodiscard]] inline double ball_volume(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "ball_volume");
    const double om = unit_sphere_area(p.m);
    if (p.k == 0.0) return om * std::pow(s, p.m) / p.m;
    const double k = p.k, rk = std::sqrt(k), x = rk * s;
    switch (p.m) {
    case 2: {
        const double h = std::sinh(0.5 * x);
        return om * 2.0 * h * h / k;
    }
    case 3: {
        double num = 0.0;
        if (x < 0.5) {
            // sinh(2x) - 2x = sum_{j>=1} (2x)^{2j+1}/(2j+1)!
            const double y = 2.0 * x;
            double term = y * y * y / 6.0;
            for (int j = 1; j < 30 && term > 1e-18 * num; ++j) {
                num += term;
                term *= y * y / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
            }
        } else {
            num = std::sinh(2.0 * x) - 2.0 * x;
        }
        return om * num / (4.0 * k * rk);
    }
    case 4: {
        const double h = std::sinh(0.5 * x);
        const double cm1 = 2.0 * h * h;
        return om * cm1 * cm1 * (cm1 + 3.0) / (3.0 * k * k);
    }
    default:
        return sphere_volume(s, p) * volume_ratio(s, p);
    }
}

/// f(s) = int_0^s V_k/v_k.
[[nodiscard]] inline double comparison_f(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "comparison_f");
    if (p.k == 0.0) return s * s / (2.0 * p.m);
    auto g = [&](double sig) { return sig > 0.0 ? volume_ratio(sig, p) : 0.0; };
    return integrate_gk(g, 0.0, s, kModelQuadTol).value;
}

/// z(s) = (m/(m-1)) V_k v_k'/v_k^2 - 1.
[[nodiscard]] inline double comparison_z(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "comparison_z");
    if (p.k == 0.0) return 0.0;
    const double x = std::sqrt(p.k) * s;
    if (x < kSeriesThreshold) return detail::z_series(x, p.m);
    return std::max(0.0, p.m * cn_over_sn(s, p.k) * volume_ratio(s, p) - 1.0);
}

/// V_k v_k'/v_k^2.
[[nodiscard]] inline double volume_growth_ratio(double s, const SpaceFormParams& p)
{
    return (p.m - 1.0) / p.m * (1.0 + comparison_z(s, p));
}

/// (V_k v_k' - v_k^2)/v_k^2.
[[nodiscard]] inline double volume_mismatch(double s, const SpaceFormParams& p)
{
    return volume_growth_ratio(s, p) - 1.0;
}

/// a(s) = (m-1)^2 k/4 + (v'/v)^2/4 - (v''/v)/2, which collapses to (m-1)(3-m)/(4 sn^2).
[[nodiscard]] inline double spectral_weight_a(double s, const SpaceFormParams& p)
{
    detail::require_pos(s, "spectral_weight_a");
    if (p.m == 3) return 0.0;
    const double w = sn(s, p.k);
    return (p.m - 1.0) * (3.0 - p.m) / (4.0 * w * w);
}

struct RatioMonotoneReport {
    std::vector<double> differences; ///< V/v(s_{i+1}) - V/v(s_i)
    double min_difference = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// Checks that V_k/v_k is non-decreasing along the grid.
[[nodiscard]] inline RatioMonotoneReport check_ratio_monotone(const Grid& grid, const SpaceFormParams& p,
                                                              double rel_tol = 1e-12)
{
    RatioMonotoneReport rep;
    rep.tolerance = rel_tol;
    std::vector<double> q;
    q.reserve(grid.size());
    for (double s : grid) q.push_back(volume_ratio(s, p));
    for (std::size_t i = 1; i < q.size(); ++i) {
        const double d = q[i] - q[i - 1];
        rep.differences.push_back(d);
        rep.min_difference = (i == 1) ? d : std::min(rep.min_difference, d);
        if (d < -rel_tol * std::max(1.0, std::abs(q[i]))) rep.pass = false;
    }
    return rep;
}

} // namespace densitylab
