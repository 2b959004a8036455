#pragma once

// Weyl-sequence test functions u = eta(r) psi(r), their Rayleigh defect, the
// Q(t,s) bookkeeping diagnostic and the Cheeger-type lower bound on Lap r.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "densitylab/comparison_ode.hpp"
#include "densitylab/errors.hpp"
#include "densitylab/geometry_catalog.hpp"
#include "densitylab/model_geometry.hpp"
#include "densitylab/quadrature.hpp"
#include "densitylab/radial_profiles.hpp"

namespace densitylab {

/// Bottom of the model spectrum, (m-1)^2 k/4.
[[nodiscard]] inline double spectral_floor(const SpaceFormParams& p)
{
    return (p.m - 1.0) * (p.m - 1.0) * p.k / 4.0;
}

/// beta = sqrt(lambda - (m-1)^2 k/4).
[[nodiscard]] inline double beta(double lambda, const SpaceFormParams& p)
{
    const double fl = spectral_floor(p);
    if (!(lambda >= fl))
        throw SpectralFloorError("lambda = " + std::to_string(lambda) + " lies below the spectral floor "
                                     + std::to_string(fl),
                                 fl);
    return std::sqrt(lambda - fl);
}

/// Quintic smoothstep 6x^5 - 15x^4 + 10x^3 and its derivatives on [0,1].
namespace smoothstep {
inline constexpr double sup_d1 = 15.0 / 8.0;
inline constexpr double sup_d2 = 5.773502691896257645; // 10/sqrt(3), at x = (3 +- sqrt 3)/6
[[nodiscard]] constexpr double value(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
[[nodiscard]] constexpr double d1(double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); }
[[nodiscard]] constexpr double d2(double x) { return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }
} // namespace smoothstep

/// Derivative-bound constant of a unit ramp: sup|eta'| + sup|eta''|.
inline constexpr double kCutoffConstant = smoothstep::sup_d1 + smoothstep::sup_d2;

/// C^2 window: 0 outside (t-1, S), 1 on [t, s], quintic ramps in between.
class Cutoff {
public:
    struct Ramp {
        double lo = 0.0, hi = 0.0;
        double sup_d1 = 0.0, sup_d2 = 0.0;
    };

    Cutoff(double t, double s, double S) : t_(t), s_(s), S_(S)
    {
        if (!(t < s) || !(s < S)) throw DomainError("cutoff needs t < s < S");
    }

    [[nodiscard]] double value(double r) const
    {
        if (r <= t_ - 1.0 || r >= S_) return 0.0;
        if (r < t_) return smoothstep::value(r - (t_ - 1.0));
        if (r <= s_) return 1.0;
        return 1.0 - smoothstep::value((r - s_) / (S_ - s_));
    }
    [[nodiscard]] double d1(double r) const
    {
        if (r <= t_ - 1.0 || r >= S_ || (r >= t_ && r <= s_)) return 0.0;
        if (r < t_) return smoothstep::d1(r - (t_ - 1.0));
        const double L = S_ - s_;
        return -smoothstep::d1((r - s_) / L) / L;
    }
    [[nodiscard]] double d2(double r) const
    {
        if (r <= t_ - 1.0 || r >= S_ || (r >= t_ && r <= s_)) return 0.0;
        if (r < t_) return smoothstep::d2(r - (t_ - 1.0));
        const double L = S_ - s_;
        return -smoothstep::d2((r - s_) / L) / (L * L);
    }

    /// Certified suprema on [t-1, t].
    [[nodiscard]] Ramp inner() const { return {t_ - 1.0, t_, smoothstep::sup_d1, smoothstep::sup_d2}; }
    /// Certified suprema on [s, S].
    [[nodiscard]] Ramp outer() const
    {
        const double L = S_ - s_;
        return {s_, S_, smoothstep::sup_d1 / L, smoothstep::sup_d2 / (L * L)};
    }

    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double s() const noexcept { return s_; }
    [[nodiscard]] double S() const noexcept { return S_; }

private:
    double t_, s_, S_;
};

[[nodiscard]] inline Cutoff cutoff(double t, double s, double S) { return Cutoff(t, s, S); }

struct ProbeConfig {
    double lambda = 1.0;
    double t = 10.0, s = 20.0, S = 24.0;
    double cutoff_constant = kCutoffConstant;

    /// Window ordering with S - s >= 1 and t - 1 > 1.
    void validate(const SpaceFormParams& p) const
    {
        (void)beta(lambda, p);
        if (!(t > 2.0)) throw ConfigError("probe window needs t > 2");
        if (!(s > t)) throw ConfigError("probe window needs s > t");
        if (!(S - s >= 1.0)) throw ConfigError("probe window needs S - s >= 1");
    }
};

struct WindowSpec {
    double t = 0.0, s = 0.0, S = 0.0;
};

/// s = 2t and S = s + sqrt(s) for k = 0, S = s + 1 for k > 0.
[[nodiscard]] inline std::vector<WindowSpec> window_family(double k, std::span<const double> ts)
{
    std::vector<WindowSpec> w;
    for (double t : ts) {
        const double s = 2.0 * t;
        w.push_back({t, s, k == 0.0 ? s + std::sqrt(s) : s + 1.0});
    }
    return w;
}

/// psi = e^{i beta r}/sqrt(v_k(r)) with first and second r-derivatives.
struct PsiJet {
    std::complex<double> psi, d1, d2;
};

[[nodiscard]] inline PsiJet psi_jet(double r, double b, const SpaceFormParams& p)
{
    const double w = sn(r, p.k);
    const double ell = (p.m - 1.0) * cn_over_sn(r, p.k); // v'/v
    const std::complex<double> lp(-0.5 * ell, b);        // (log psi)'
    const std::complex<double> psi = std::polar(1.0 / std::sqrt(sphere_volume(r, p)), b * r);
    return {psi, psi * lp, psi * (lp * lp + (p.m - 1.0) / (2.0 * w * w))};
}

struct ProbeResult {
    ProbeConfig config;
    double beta = 0.0;
    double defect = 0.0;       ///< ||Lap u + lambda u|| / ||u||
    double defect_error = 0.0; ///< propagated quadrature error of the ratio
    double norm_u = 0.0;
    double q_value = std::numeric_limits<double>::quiet_NaN();
    double f_sup = std::numeric_limits<double>::quiet_NaN();
    double omega = std::numeric_limits<double>::quiet_NaN();
    double chi = std::numeric_limits<double>::quiet_NaN();
    double c_hat = std::numeric_limits<double>::quiet_NaN();
    double c_k = std::numeric_limits<double>::quiet_NaN();
};

/// Rayleigh defect of u = eta(r) psi(r) by 1-D quadrature over {t-1 <= r <= S}.
[[nodiscard]] inline ProbeResult defect(const CatalogEntry& e, const ProbeConfig& cfg, const QuadratureSettings& q = {})
{
    const auto& p = e.params();
    cfg.validate(p);
    if (cfg.S > e.r_max())
        throw DomainError("probe window S = " + std::to_string(cfg.S) + " exceeds the resolvable chart; maximal usable S = "
                          + std::to_string(e.r_max()));
    ProbeResult res;
    res.config = cfg;
    res.beta = beta(cfg.lambda, p);
    const Cutoff eta(cfg.t, cfg.s, cfg.S);
    const double lam = cfg.lambda;

    auto op = [&](const RadialSample& x) {
        const auto j = psi_jet(x.r, res.beta, p);
        const double e0 = eta.value(x.r), e1 = eta.d1(x.r), e2 = eta.d2(x.r);
        const std::complex<double> u = e0 * j.psi;
        const std::complex<double> ur = e1 * j.psi + e0 * j.d1;
        const std::complex<double> urr = e2 * j.psi + 2.0 * e1 * j.d1 + e0 * j.d2;
        return std::pair{u, urr * (x.gradr * x.gradr) + ur * x.lap_r + lam * u};
    };
    // Where eta = 1 the residual is pure cancellation noise; a small multiple of |u|^2
    // gives the relative-tolerance quadrature an absolute scale and is removed afterwards.
    constexpr double floor_weight = 1e-12;
    const PointField num = [&](const RadialSample& x) {
        const auto [u, res] = op(x);
        return std::norm(res) + floor_weight * std::max(lam * lam, 1.0) * std::norm(u);
    };
    const PointField den = [&](const RadialSample& x) { return std::norm(op(x).first); };

    QuadResult N, D;
    const double cuts[] = {cfg.t - 1.0, cfg.t, cfg.s, cfg.S};
    for (int i = 0; i < 3; ++i) {
        const double a = std::max(cuts[i], 0.0), b = cuts[i + 1];
        if (b <= a) continue;
        N += region_integral(e, a, b, num, q);
        D += region_integral(e, a, b, den, q);
    }
    N.value = std::max(N.value - floor_weight * std::max(lam * lam, 1.0) * D.value, 0.0);
    if (!(D.value > 0.0)) throw DomainError("probe window does not meet the submanifold");
    res.norm_u = std::sqrt(D.value);
    res.defect = std::sqrt(N.value / D.value);
    res.defect_error = 0.5 * res.defect * (N.error / std::max(N.value, 1e-300) + D.error / D.value);
    return res;
}

struct QDiagnostic {
    double q = 0.0;
    double f_sup = 0.0;  ///< F(t) = sup_{sigma >= t-1} a^2 + zeta^2
    double omega = 0.0;  ///< sup_{sigma >= t-1} (V v' - v^2)/v^2
    double chi = 0.0;    ///< c_hat F + omega
    double c_hat = 0.0;
    double c_k = 0.0;
};

namespace detail {

// int_a^b of the piecewise-linear interpolant of y on grid s.
inline double integrate_samples(const std::vector<double>& s, const std::vector<double>& y, double a, double b)
{
    if (!(b > a)) return 0.0;
    auto interp = [&](double x) {
        auto it = std::upper_bound(s.begin(), s.end(), x);
        std::size_t j = static_cast<std::size_t>(it - s.begin());
        j = std::clamp<std::size_t>(j, 1, s.size() - 1);
        const double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
        return (1.0 - w) * y[j - 1] + w * y[j];
    };
    double acc = 0.0;
    double xa = a, ya = interp(a);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] <= a) continue;
        if (s[i] >= b) break;
        acc += 0.5 * (s[i] - xa) * (y[i] + ya);
        xa = s[i];
        ya = y[i];
    }
    acc += 0.5 * (b - xa) * (interp(b) + ya);
    return acc;
}

} // namespace detail

/// Q(t,s) with its absolute constant set to 1, and the F, omega, chi, c_k bookkeeping.
[[nodiscard]] inline QDiagnostic q_bound(const RadialProfile& prof, const ProbeConfig& cfg, double delta = 0.1,
                                         const ComparisonSolution* comparison = nullptr)
{
    const auto& p = prof.params;
    cfg.validate(p);
    if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
    const auto& s = prof.grid.values();
    if (s.front() > cfg.t - 1.0 || s.back() < cfg.S)
        throw DomainError("profile grid does not cover [t-1, S]");
    const std::size_t n = s.size();

    QDiagnostic d;
    auto zeta = [&](double x) {
        if (!comparison) return 0.0;
        if (x > comparison->grid.back()) return comparison->zeta.back();
        return comparison->zeta_at(x);
    };
    auto Fval = [&](double x) {
        const double a = spectral_weight_a(x, p), z = zeta(x);
        return a * a + z * z;
    };
    d.f_sup = Fval(cfg.t - 1.0);
    d.omega = p.k == 0.0 ? -1.0 / p.m : 0.0; // limit at infinity
    d.omega = std::max(d.omega, volume_mismatch(cfg.t - 1.0, p));
    for (double x : s)
        if (x >= cfg.t - 1.0) {
            d.f_sup = std::max(d.f_sup, Fval(x));
            d.omega = std::max(d.omega, volume_mismatch(x, p));
        }
    if (comparison)
        for (std::size_t i = 0; i < comparison->grid.size(); ++i)
            if (comparison->grid[i] >= cfg.t - 1.0) d.f_sup = std::max(d.f_sup, Fval(comparison->grid[i]));

    double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    const Grid cg = Grid::logspace(1.0, std::max(cfg.S, 1.0 + 1e-9), 512);
    for (double x : cg) {
        const double v = volume_growth_ratio(x, p);
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    d.c_hat = std::max(vmax, 1.0 / vmin);
    d.c_k = (p.k == 0.0 ? 1.0 / p.m : 0.0) + delta / (2.0 * d.c_hat);
    d.chi = d.c_hat * d.f_sup + d.omega;

    std::vector<double> j1(n), jt(n);
    for (std::size_t i = 0; i < n; ++i) {
        j1[i] = prof.flux_j[i] * (1.0 + prof.tilt_t[i]);
        jt[i] = prof.flux_j[i] * prof.tilt_t[i];
    }
    const double D = detail::integrate_samples(s, j1, cfg.t, cfg.s);
    if (!(D > 0.0)) throw DomainError("flux vanishes on [t, s]");
    const double all = detail::integrate_samples(s, j1, cfg.t - 1.0, cfg.S);
    const double tilt = detail::integrate_samples(s, jt, cfg.t - 1.0, cfg.S);
    const double outer = detail::integrate_samples(s, j1, cfg.s, cfg.S);
    const double inner = detail::integrate_samples(s, j1, cfg.t - 1.0, cfg.t);
    const double L = cfg.S - cfg.s;
    d.q = (d.f_sup * all + tilt) / D + outer / (L * L * D) + inner / D;
    return d;
}

/// Defect and Q diagnostic for one window.
[[nodiscard]] inline ProbeResult run_probe(const CatalogEntry& e, const RadialProfile& prof, const ProbeConfig& cfg,
                                           double delta = 0.1, const ComparisonSolution* comparison = nullptr,
                                           const QuadratureSettings& q = {})
{
    auto r = defect(e, cfg, q);
    const auto d = q_bound(prof, cfg, delta, comparison);
    r.q_value = d.q;
    r.f_sup = d.f_sup;
    r.omega = d.omega;
    r.chi = d.chi;
    r.c_hat = d.c_hat;
    r.c_k = d.c_k;
    return r;
}

struct CheegerReport {
    double floor = 0.0;          ///< (m-1)^2 k/4
    double min_hessian_margin = 0.0; ///< min of Lap r - (m-1) sn'/sn (r)
    double min_model_margin = 0.0;   ///< min of (m-1) sn'/sn (r) - (m-1) sqrt k
    std::size_t samples = 0;
    bool pass = true;
};

/// Checks Lap r >= (m-1) sn'/sn(r) >= (m-1) sqrt(k) at profile coordinates us.
[[nodiscard]] inline CheegerReport cheeger_bound(const CatalogEntry& e, std::span<const double> us, double rel_tol = 1e-9)
{
    const auto& p = e.params();
    CheegerReport rep;
    rep.floor = spectral_floor(p);
    rep.min_hessian_margin = std::numeric_limits<double>::infinity();
    rep.min_model_margin = std::numeric_limits<double>::infinity();
    const double m1 = p.m - 1.0;
    for (double u : us) {
        const auto x = e.radial(u);
        if (!(x.r > 0.0)) continue;
        const double model = m1 * cn_over_sn(x.r, p.k);
        const double h = x.lap_r - model;
        const double g = model - m1 * std::sqrt(p.k);
        rep.min_hessian_margin = std::min(rep.min_hessian_margin, h);
        rep.min_model_margin = std::min(rep.min_model_margin, g);
        if (h < -rel_tol * std::max(1.0, model) || g < -rel_tol * std::max(1.0, model)) rep.pass = false;
        ++rep.samples;
    }
    return rep;
}

} // namespace densitylab
