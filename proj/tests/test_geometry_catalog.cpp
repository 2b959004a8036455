#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "densitylab/geometry_catalog.hpp"

using namespace densitylab;
using std::numbers::pi;

namespace {

struct Case {
    const char* name;
    CatalogEntry entry;
};

std::vector<Case> catalog()
{
    return {
        {"tg_flat", make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 0.0))},
        {"tg_flat_m3", make_entry(EntryId::totally_geodesic, SpaceFormParams::make(3, 4, 0.0))},
        {"tg_hyp", make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 1.0))},
        {"tg_hyp_m3_k4", make_entry(EntryId::totally_geodesic, SpaceFormParams::make(3, 5, 4.0))},
        {"tg_flat_offset", make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 0.0), 0.7)},
        {"tg_hyp_offset", make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 1.0), 0.5)},
        {"cone", make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0))},
        {"catenoid", make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0))},
        {"poincare", make_entry(EntryId::hyperbolic_plane_poincare, SpaceFormParams::make(2, 3, 1.0), 0.5)},
    };
}

// Chart points spread over the profile range and the angular ranges.
std::vector<std::vector<double>> samples(const CatalogEntry& e, int n)
{
    auto [lo, hi] = e.profile_range();
    if (hi > 60.0) hi = std::min(hi, 60.0);
    if (lo < -10.0) lo = -10.0, hi = std::min(hi, 10.0);
    std::vector<std::vector<double>> pts;
    for (int i = 1; i < n; ++i) {
        std::vector<double> u{lo + (hi - lo) * i / n};
        for (std::size_t a = 0; a < e.angle_ranges().size(); ++a) {
            const auto [alo, ahi] = e.angle_ranges()[a];
            u.push_back(alo + (ahi - alo) * std::fmod(0.137 * (i + 3 * a) + 0.05, 1.0));
        }
        pts.push_back(u);
    }
    return pts;
}

} // namespace

TEST(Catalog, ParsesIdsAndRejectsUnknown)
{
    EXPECT_EQ(parse_entry_id("euclidean_catenoid"), EntryId::euclidean_catenoid);
    EXPECT_THROW((void)parse_entry_id("helicoid"), ConfigError);
    EXPECT_THROW((void)make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(3, 4, 0.0)), ConfigError);
    EXPECT_THROW((void)make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0), 1.0), ConfigError);
    EXPECT_THROW((void)make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 0.0), -1.0), ConfigError);
}

TEST(Catalog, TotallyGeodesicPlaneExample)
{
    const auto e = make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 0.0));
    const auto d = e.evaluate({3.0, 0.4});
    EXPECT_NEAR(d.r, 3.0, 1e-14);
    EXPECT_NEAR(d.gradr_norm, 1.0, 1e-14);
    EXPECT_NEAR(d.lap_r, 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(d.II_norm, 0.0, 1e-14);
    EXPECT_EQ(d.position.size(), 3u);
}

TEST(Catalog, CatenoidNeckIsCritical)
{
    const auto e = make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0));
    const auto d = e.evaluate({0.0, 1.1});
    EXPECT_NEAR(d.r, 1.0, 1e-14);
    EXPECT_NEAR(d.gradr_norm, 0.0, 1e-14);
    ASSERT_EQ(e.critical_levels().size(), 1u);
    EXPECT_NEAR(e.critical_levels()[0], 1.0, 1e-12);
    EXPECT_EQ(e.branches().size(), 2u);
    // closed forms r = sqrt(cosh^2 v + v^2), |II| = sqrt2 / cosh^2 v
    const double v = 0.8;
    const auto p = e.evaluate({v, 0.2});
    EXPECT_NEAR(p.r, std::sqrt(std::cosh(v) * std::cosh(v) + v * v), 1e-13);
    EXPECT_NEAR(p.II_norm, std::sqrt(2.0) / (std::cosh(v) * std::cosh(v)), 1e-12);
}

TEST(Catalog, CliffordConeExample)
{
    const auto e = make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0));
    for (double s : {0.5, 2.0, 9.0}) {
        const auto d = e.evaluate({s, 0.3, 1.9});
        EXPECT_NEAR(d.r, s, 1e-13 * s);
        EXPECT_NEAR(d.gradr_norm, 1.0, 1e-13);
        EXPECT_NEAR(d.II_norm, std::sqrt(2.0) / s, 1e-12 / s);
        EXPECT_NEAR(d.lap_r, 2.0 / s, 1e-12 / s);
    }
    EXPECT_TRUE(e.critical_levels().empty());
}

TEST(Catalog, OffsetHyperbolicPlaneExample)
{
    const double d = 0.5;
    const auto e = make_entry(EntryId::hyperbolic_plane_poincare, SpaceFormParams::make(2, 3, 1.0), d);
    EXPECT_NEAR(e.r_min(), d, 1e-10);
    // closest point at ambient distance d, and the hyperbolic Pythagorean law
    for (double rho : {0.5, 2.0, 6.0}) {
        const auto p = e.evaluate({rho, 0.9});
        EXPECT_NEAR(p.r, std::acosh(std::cosh(rho) * std::cosh(d)), 1e-9);
    }
    EXPECT_TRUE(e.in_poincare_ball());
}

TEST(Catalog, PoleEvaluationRaises)
{
    const auto tg = make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 0.0));
    EXPECT_NO_THROW((void)tg.evaluate({0.0, 0.1}));
    EXPECT_TRUE(std::isinf(tg.evaluate({0.0, 0.1}).lap_r));
    const auto cone = make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0));
    EXPECT_THROW((void)cone.evaluate({0.0, 0.1, 0.2}), PoleSingularityError);
}

TEST(Catalog, ConformalIdentityOnHyperbolicPlanes)
{
    const auto centred = make_entry(EntryId::hyperbolic_plane_poincare, SpaceFormParams::make(2, 3, 1.0), 0.0);
    for (double rho : {0.3, 1.0, 4.0}) {
        std::vector<double> u{rho, 0.7};
        const auto c = centred.conformal_terms(u);
        EXPECT_NEAR(c.euclidean_ii_sq, 0.0, 1e-12);
        EXPECT_NEAR(c.residual, 0.0, 1e-12);
    }
    const auto offset = make_entry(EntryId::hyperbolic_plane_poincare, SpaceFormParams::make(2, 3, 1.0), 0.5);
    for (double rho = 0.1; rho < 12.0; rho += 0.37)
        for (double phi : {0.0, 1.3, 2.9, 4.4}) {
            std::vector<double> u{rho, phi};
            EXPECT_LE(std::abs(offset.conformal_identity_residual(u)), 1e-6) << rho << " " << phi;
        }
}

TEST(Catalog, ConformalIdentityNearBoundary)
{
    const auto e = make_entry(EntryId::hyperbolic_plane_poincare, SpaceFormParams::make(2, 3, 1.0), 0.5);
    // find rho with |x| = 1 - 1e-3 along phi = 0.4
    double lo = 0.0, hi = 17.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto c = e.conformal_terms(std::vector<double>{mid, 0.4});
        (c.ball_radius < 1.0 - 1e-3 ? lo : hi) = mid;
    }
    const auto c = e.conformal_terms(std::vector<double>{lo, 0.4});
    EXPECT_NEAR(c.ball_radius, 1.0 - 1e-3, 1e-9);
    EXPECT_TRUE(std::isfinite(c.normal_log_gradient_sq));
    EXPECT_LE(std::abs(c.residual), 1e-6);
}

TEST(CatalogProperties, MinimalityAndGradientBounds)
{
    for (const auto& c : catalog())
        for (const auto& u : samples(c.entry, 60)) {
            const auto d = c.entry.evaluate(u);
            if (!(d.r > 1e-8)) continue;
            EXPECT_GE(d.gradr_norm, 0.0) << c.name;
            // ball coordinates lose digits like e^rho near the chart edge
            const double slack = c.entry.in_poincare_ball() ? 1e-15 * std::exp(u[0]) : 0.0;
            EXPECT_LE(d.gradr_norm, 1.0 + 1e-12 + slack) << c.name << " u0=" << u[0];
            EXPECT_GT(d.area_density, 0.0) << c.name;
            EXPECT_NEAR(d.mean_curvature, 0.0, 1e-8 * (1.0 + d.II_norm)) << c.name;
            const double res = c.entry.minimality_residual(u);
            EXPECT_LE(std::abs(res), 1e-8 * std::max(1.0, std::abs(d.lap_r))) << c.name << " u0=" << u[0];
            // Hessian comparison lower bound
            const double lower = cn_over_sn(d.r, c.entry.params().k) * (c.entry.params().m - d.gradr_norm * d.gradr_norm);
            EXPECT_GE(d.lap_r, lower - 1e-8 * std::max(1.0, std::abs(lower))) << c.name;
        }
}

TEST(CatalogProperties, UnitGradientOnConeAndCentredTotallyGeodesic)
{
    for (const auto& c : catalog()) {
        const bool unit = c.entry.id() == EntryId::euclidean_cone_clifford
            || (c.entry.id() == EntryId::totally_geodesic && c.entry.pole_offset() == 0.0);
        if (!unit) continue;
        for (const auto& u : samples(c.entry, 40)) EXPECT_NEAR(c.entry.evaluate(u).gradr_norm, 1.0, 1e-10) << c.name;
        EXPECT_TRUE(c.entry.critical_levels().empty()) << c.name;
    }
}

TEST(CatalogProperties, HyperbolicTotallyGeodesicLaplacian)
{
    for (double k : {1.0, 4.0})
        for (int m : {2, 3}) {
            const auto e = make_entry(EntryId::totally_geodesic, SpaceFormParams::make(m, m + 1, k));
            for (double r : {0.2, 1.0, 5.0, 30.0}) {
                const auto s = e.radial(r);
                EXPECT_NEAR(s.lap_r, (m - 1) * cn_over_sn(r, k), 1e-10 * s.lap_r);
            }
        }
}

TEST(CatalogProperties, CriticalSetIsMeasureZero)
{
    // Critical points of r show up only at isolated profile coordinates.
    for (const auto& c : catalog()) {
        const auto [lo, hi] = c.entry.profile_range();
        const double a = std::max(lo, -10.0), b = std::min(hi, 30.0);
        int crit = 0, total = 0;
        for (int i = 0; i <= 4000; ++i) {
            const double u = a + (b - a) * i / 4000.0;
            if (u == 0.0 && c.entry.id() != EntryId::euclidean_catenoid) continue;
            const auto s = c.entry.radial(u);
            if (!(s.r > 0.0)) continue;
            ++total;
            if (s.gradr < 1e-9) ++crit;
        }
        EXPECT_LE(crit, 1) << c.name;
        EXPECT_GT(total, 1000) << c.name;
    }
}
