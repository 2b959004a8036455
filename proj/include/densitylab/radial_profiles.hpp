#pragma once

// Level-set and annulus quadrature along the profile curve, and the radial
// profile functions Theta, J, Jbar, T, E built from them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "densitylab/errors.hpp"
#include "densitylab/geometry_catalog.hpp"
#include "densitylab/grid.hpp"
#include "densitylab/model_geometry.hpp"
#include "densitylab/quadrature.hpp"

namespace densitylab {

struct QuadratureSettings {
    double rel_tol = 1e-10;
    double exclusion_radius = 1e-3; ///< guard band around critical levels
    unsigned max_depth = kDefaultQuadDepth;
};

enum class LevelIntegrand { one_over_gradr, gradr, lap_r_over_gradr };

using PointField = std::function<double(const RadialSample&)>;

[[nodiscard]] inline PointField field_of(LevelIntegrand which)
{
    switch (which) {
    case LevelIntegrand::one_over_gradr: return [](const RadialSample& p) { return 1.0 / p.gradr; };
    case LevelIntegrand::gradr: return [](const RadialSample& p) { return p.gradr; };
    case LevelIntegrand::lap_r_over_gradr: return [](const RadialSample& p) { return p.lap_r / p.gradr; };
    }
    return [](const RadialSample&) { return 0.0; };
}

namespace detail {

// Sum over the orbits r = s, one per branch; no critical-level guard.
inline double level_sum(const CatalogEntry& e, double s, const PointField& f)
{
    double acc = 0.0;
    for (const auto& b : e.branches()) {
        if (!(s > b.r_lo && s <= b.r_hi)) continue;
        const auto p = e.radial(e.solve_level(b, s));
        acc += p.orbit * f(p);
    }
    return acc;
}

inline void check_level(const CatalogEntry& e, double s, const QuadratureSettings& q)
{
    if (!(s > 0.0)) throw DomainError("level must be > 0");
    if (s > e.r_max()) throw DomainError("level beyond the resolvable chart (max r = " + std::to_string(e.r_max()) + ")");
    for (double c : e.critical_levels())
        if (std::abs(s - c) <= q.exclusion_radius)
            throw CriticalLevelError("level " + std::to_string(s) + " lies within the exclusion radius of critical level "
                                         + std::to_string(c) + "; use annulus quadrature",
                                     c);
}

} // namespace detail

/// Integral of a pointwise field over the level set r = s.
[[nodiscard]] inline QuadResult level_integral(const CatalogEntry& e, double s, const PointField& f,
                                               const QuadratureSettings& q = {})
{
    detail::check_level(e, s, q);
    const double v = detail::level_sum(e, s, f);
    return {v, 32.0 * std::numeric_limits<double>::epsilon() * std::abs(v)};
}

[[nodiscard]] inline QuadResult level_integral(const CatalogEntry& e, double s, LevelIntegrand which,
                                               const QuadratureSettings& q = {})
{
    return level_integral(e, s, field_of(which), q);
}

/// Integral of a field over {t <= r <= s} by quadrature in the profile coordinate.
[[nodiscard]] inline QuadResult region_integral(const CatalogEntry& e, double t, double s, const PointField& f,
                                                const QuadratureSettings& q = {})
{
    if (!(s > t)) return {};
    if (s > e.r_max()) throw DomainError("region beyond the resolvable chart (max r = " + std::to_string(e.r_max()) + ")");
    QuadResult acc;
    for (const auto& b : e.branches()) {
        if (t >= b.r_hi || s <= b.r_lo) continue;
        double ua = e.solve_level(b, std::max(t, b.r_lo));
        double ub = e.solve_level(b, std::min(s, b.r_hi));
        if (ua > ub) std::swap(ua, ub);
        auto g = [&](double u) {
            const auto p = e.radial(u);
            return f(p) * p.weight();
        };
        acc += integrate_gk(g, ua, ub, q.rel_tol, q.max_depth);
    }
    return acc;
}

/// Coarea form int_t^s (int_{r=sigma} f/|grad r|) d sigma with square-root
/// substitutions at critical levels and branch ends.
[[nodiscard]] inline QuadResult coarea_integral(const CatalogEntry& e, double t, double s, const PointField& f,
                                                const QuadratureSettings& q = {})
{
    if (!(s > t)) return {};
    std::vector<double> cuts{t, s};
    for (double c : e.critical_levels())
        if (c > t && c < s) cuts.push_back(c);
    for (const auto& b : e.branches())
        for (double c : {b.r_lo, b.r_hi})
            if (c > t && c < s) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto is_break = [&](double c) {
        if (c <= 0.0) return true;
        for (double x : e.critical_levels())
            if (x == c) return true;
        for (const auto& b : e.branches())
            if (b.r_lo == c || b.r_hi == c) return true;
        return false;
    };
    auto L = [&](double sig) {
        return detail::level_sum(e, sig, [&](const RadialSample& p) { return f(p) / p.gradr; });
    };

    QuadResult acc;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1], c = 0.5 * (a + b);
        if (is_break(a)) {
            acc += integrate_gk([&](double w) { return 2.0 * w * L(a + w * w); }, 0.0, std::sqrt(c - a), q.rel_tol, q.max_depth);
        } else {
            acc += integrate_gk(L, a, c, q.rel_tol, q.max_depth);
        }
        if (is_break(b)) {
            acc += integrate_gk([&](double w) { return 2.0 * w * L(b - w * w); }, 0.0, std::sqrt(b - c), q.rel_tol, q.max_depth);
        } else {
            acc += integrate_gk(L, c, b, q.rel_tol, q.max_depth);
        }
    }
    return acc;
}

struct AnnulusVolume {
    QuadResult direct;
    QuadResult coarea;
};

/// vol{t <= r <= s} computed directly and through the coarea formula.
[[nodiscard]] inline AnnulusVolume annulus_volume(const CatalogEntry& e, double t, double s,
                                                  const QuadratureSettings& q = {})
{
    if (!(t > 0.0) || !(s > t)) throw DomainError("annulus_volume needs 0 < t < s");
    const PointField one = [](const RadialSample&) { return 1.0; };
    return {region_integral(e, t, s, one, q), coarea_integral(e, t, s, one, q)};
}

struct ProfileNudge {
    std::size_t index = 0;
    double original = 0.0;
    double adjusted = 0.0;
};

struct RadialProfile {
    static constexpr int schema_version = 1;

    std::string entry;
    SpaceFormParams params;
    double pole_offset = 0.0;
    Grid grid;
    std::vector<double> theta, flux_j, barj, tilt_t, energy_e;
    std::vector<double> err_theta, err_flux_j, err_barj, err_tilt_t, err_energy_e;
    std::vector<bool> empty_level;        ///< level set r = s_i is empty (s_i < r_min)
    std::vector<std::string> annotations; ///< non-empty where a sample's quadrature failed
    std::vector<ProfileNudge> nudges;
    std::vector<double> critical_levels;
    double quad_tol = 0.0;
    double exclusion_radius = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }

    void resize(std::size_t n)
    {
        for (auto* v : {&theta, &flux_j, &barj, &tilt_t, &energy_e, &err_theta, &err_flux_j, &err_barj, &err_tilt_t,
                        &err_energy_e})
            v->assign(n, 0.0);
        empty_level.assign(n, false);
        annotations.assign(n, {});
    }
};

/// Samples within the exclusion radius of a critical level move up by ten radii.
[[nodiscard]] inline Grid nudge_grid(const CatalogEntry& e, const Grid& grid, const QuadratureSettings& q,
                                     std::vector<ProfileNudge>* log = nullptr)
{
    std::vector<double> s(grid.begin(), grid.end());
    for (std::size_t i = 0; i < s.size(); ++i)
        for (double c : e.critical_levels())
            if (std::abs(s[i] - c) <= q.exclusion_radius) {
                const double to = c + 10.0 * q.exclusion_radius;
                if (log) log->push_back({i, s[i], to});
                s[i] = to;
            }
    try {
        return Grid(std::move(s));
    } catch (const DomainError&) {
        throw DomainError("grid nudging off a critical level broke strict monotonicity; use a coarser grid near it");
    }
}

/// Theta, J, Jbar, T, E on the grid, accumulated annulus by annulus.
[[nodiscard]] inline RadialProfile build_profile(const CatalogEntry& e, const Grid& grid_in,
                                                 const QuadratureSettings& q = {})
{
    RadialProfile prof;
    prof.entry = std::string(to_string(e.id()));
    prof.params = e.params();
    prof.pole_offset = e.pole_offset();
    prof.quad_tol = q.rel_tol;
    prof.exclusion_radius = q.exclusion_radius;
    prof.critical_levels = e.critical_levels();
    prof.grid = nudge_grid(e, grid_in, q, &prof.nudges);
    const auto& s = prof.grid.values();
    if (s.back() > e.r_max())
        throw DomainError("grid extends beyond the resolvable chart (max r = " + std::to_string(e.r_max()) + ")");
    const std::size_t n = s.size();
    prof.resize(n);
    const auto& P = e.params();

    const PointField one = [](const RadialSample&) { return 1.0; };
    const PointField g2 = [](const RadialSample& p) { return p.gradr * p.gradr; };
    const PointField lap = [](const RadialSample& p) { return p.lap_r; };
    const PointField gr = field_of(LevelIntegrand::gradr);
    const PointField ig = field_of(LevelIntegrand::one_over_gradr);

    QuadResult vol, en, lp;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            vol += region_integral(e, prev, s[i], one, q);
            en += region_integral(e, prev, s[i], g2, q);
            lp += region_integral(e, prev, s[i], lap, q);
        } catch (const std::exception& ex) {
            prof.annotations[i] = std::string("annulus quadrature failed: ") + ex.what();
        }
        prev = s[i];
        const double V = ball_volume(s[i], P), v = sphere_volume(s[i], P);
        prof.theta[i] = vol.value / V;
        prof.err_theta[i] = vol.error / V;
        prof.energy_e[i] = en.value / V;
        prof.err_energy_e[i] = en.error / V;
        prof.barj[i] = lp.value / v;
        prof.err_barj[i] = lp.error / v;

        if (s[i] <= e.r_min()) {
            prof.empty_level[i] = true;
            continue;
        }
        try {
            const auto a = level_integral(e, s[i], gr, q);
            const auto b = level_integral(e, s[i], ig, q);
            prof.flux_j[i] = a.value / v;
            prof.err_flux_j[i] = a.error / v;
            prof.tilt_t[i] = a.value > 0.0 ? b.value / a.value - 1.0 : 0.0;
            prof.err_tilt_t[i] = a.value > 0.0 ? (b.error + b.value * a.error / a.value) / a.value : 0.0;
        } catch (const std::exception& ex) {
            prof.flux_j[i] = prof.tilt_t[i] = std::numeric_limits<double>::quiet_NaN();
            prof.annotations[i] += std::string(prof.annotations[i].empty() ? "" : "; ") + "level integral failed: " + ex.what();
        }
    }
    return prof;
}

/// vol(intrinsic ball of radius s)/V_k(s); needs an entry whose profile coordinate
/// is arclength along geodesics from the pole.
[[nodiscard]] inline double intrinsic_density(const CatalogEntry& e, double s, const QuadratureSettings& q = {})
{
    if (!e.supports_intrinsic_distance())
        throw CapabilityError(std::string("intrinsic distance oracle unavailable for ") + std::string(to_string(e.id())));
    if (!(s > 0.0)) throw DomainError("intrinsic_density needs s > 0");
    auto w = [&](double u) { return e.radial(u).weight(); };
    const double lo = e.profile_range().first;
    return integrate_gk(w, lo, lo + s, q.rel_tol, q.max_depth).value / ball_volume(s, e.params());
}

} // namespace densitylab
