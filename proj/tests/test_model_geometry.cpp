#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "densitylab/model_geometry.hpp"

using namespace densitylab;
using std::numbers::pi;

namespace {

std::vector<SpaceFormParams> all_params()
{
    std::vector<SpaceFormParams> v;
    for (int m : {2, 3, 4, 5, 6})
        for (double k : {0.0, 0.25, 1.0, 4.0}) v.push_back(SpaceFormParams::make(m, m + 1, k));
    return v;
}

std::vector<Grid> random_grids(unsigned seed, int count)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> lo(1e-3, 2.0), len(0.5, 25.0);
    std::uniform_int_distribution<int> n(2, 60);
    std::vector<Grid> g;
    for (int i = 0; i < count; ++i) {
        const double a = lo(rng);
        g.push_back(Grid::linspace(a, a + len(rng), static_cast<std::size_t>(n(rng))));
    }
    return g;
}

} // namespace

TEST(SpaceForm, ValidatesDimensionsAndCurvature)
{
    EXPECT_THROW((void)SpaceFormParams::make(1, 2, 0.0), ConfigError);
    EXPECT_THROW((void)SpaceFormParams::make(3, 3, 0.0), ConfigError);
    EXPECT_THROW((void)SpaceFormParams::make(2, 3, -1.0), ConfigError);
    EXPECT_NO_THROW((void)SpaceFormParams::make(2, 5, 2.0));
}

TEST(Grid, ParsesLinearAndLogSpecs)
{
    const auto g = Grid::parse("1.05:50:200");
    EXPECT_EQ(g.size(), 200u);
    EXPECT_DOUBLE_EQ(g.front(), 1.05);
    EXPECT_DOUBLE_EQ(g.back(), 50.0);
    const auto l = Grid::parse("log:1:1000:4");
    EXPECT_NEAR(l[1], 10.0, 1e-12);
    EXPECT_THROW((void)Grid::parse("1:2"), ConfigError);
    EXPECT_THROW((void)Grid::parse("2:1:5"), std::exception);
    EXPECT_THROW((void)Grid(std::vector<double>{1.0, 1.0}), DomainError);
    EXPECT_THROW((void)Grid(std::vector<double>{0.0, 1.0}), DomainError);
}

TEST(ModelFunctions, SnExamples)
{
    EXPECT_DOUBLE_EQ(sn(2.0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(sn(0.0, 1.0), 0.0);
    EXPECT_NEAR(sn(1.0, 1.0), 1.1752011936438014, 1e-15);
    EXPECT_NEAR(sn(1.0, 4.0), std::sinh(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(cn(1.0, 1.0), std::cosh(1.0), 1e-15);
}

TEST(ModelFunctions, SnSatisfiesJacobiEquation)
{
    for (double k : {0.0, 0.5, 1.0, 3.0})
        for (double t = 0.05; t < 8.0; t += 0.173) {
            const double h = 1e-4;
            const double d2 = (sn(t + h, k) - 2 * sn(t, k) + sn(t - h, k)) / (h * h);
            EXPECT_NEAR(d2, k * sn(t, k), 1e-6 * std::max(1.0, sn(t, k))) << "k=" << k << " t=" << t;
            // exact identity through cn
            EXPECT_NEAR(cn(t, k) * cn(t, k) - k * sn(t, k) * sn(t, k), 1.0, 1e-10 * cn(t, k) * cn(t, k));
        }
}

TEST(ModelFunctions, VolumeExamples)
{
    const auto p2 = SpaceFormParams::make(2, 3, 0.0);
    EXPECT_NEAR(sphere_volume(1.0, p2), 2 * pi, 1e-14);
    EXPECT_NEAR(ball_volume(1.0, p2), pi, 1e-14);
    for (double s : {0.001, 0.3, 1.0, 7.5, 100.0}) EXPECT_NEAR(volume_ratio(s, p2), s / 2.0, 1e-14 * s);
    const auto p3 = SpaceFormParams::make(3, 4, 1.0);
    EXPECT_NEAR(ball_volume(2.0, p3), 73.16743276921113548, 1e-12);
    // area of the unit sphere in R^m
    EXPECT_NEAR(unit_sphere_area(2), 2 * pi, 1e-14);
    EXPECT_NEAR(unit_sphere_area(3), 4 * pi, 1e-14);
    EXPECT_NEAR(unit_sphere_area(4), 2 * pi * pi, 1e-13);
}

TEST(ModelFunctions, BallVolumeMatchesQuadratureForAllDimensions)
{
    for (const auto& p : all_params())
        for (double s : {0.005, 0.05, 0.7, 3.0, 9.0}) {
            // Simpson on v_k as an independent check
            const int n = 40000;
            double acc = sphere_volume(s, p) * 0.0;
            for (int i = 0; i <= n; ++i) {
                const double x = s * i / n;
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                acc += w * (x > 0 ? sphere_volume(x, p) : 0.0);
            }
            acc *= s / (3.0 * n);
            EXPECT_NEAR(ball_volume(s, p), acc, 1e-9 * acc) << "m=" << p.m << " k=" << p.k << " s=" << s;
        }
}

TEST(ModelFunctions, ComparisonExamples)
{
    const auto p2 = SpaceFormParams::make(2, 3, 0.0);
    EXPECT_NEAR(comparison_f(2.0, p2), 1.0, 1e-12);
    for (int m : {2, 3, 5})
        for (double s : {0.01, 1.0, 10.0}) EXPECT_EQ(comparison_z(s, SpaceFormParams::make(m, m + 1, 0.0)), 0.0);
    for (const auto& p : all_params()) EXPECT_NEAR(comparison_z(1e-7, p), 0.0, 1e-12);
}

TEST(ModelFunctions, SpectralWeightExamples)
{
    EXPECT_NEAR(spectral_weight_a(1.0, SpaceFormParams::make(2, 3, 0.0)), 0.25, 1e-15);
    const auto h = SpaceFormParams::make(2, 3, 1.0);
    EXPECT_LT(std::abs(spectral_weight_a(10.0, h)), 1e-7);
    EXPECT_NEAR(spectral_weight_a(10.0, h), 2.0611536309352664e-09, 1e-16);
    for (const auto& p : all_params()) EXPECT_LT(std::abs(spectral_weight_a(200.0, p)), 1e-4);
}

TEST(ModelFunctions, RatioMonotoneExamples)
{
    EXPECT_TRUE(check_ratio_monotone(Grid::linspace(0.1, 20, 100), SpaceFormParams::make(2, 3, 0.0)).pass);
    EXPECT_TRUE(check_ratio_monotone(Grid::linspace(0.1, 20, 100), SpaceFormParams::make(3, 4, 1.0)).pass);
    const auto single = check_ratio_monotone(Grid(std::vector<double>{1.0}), SpaceFormParams::make(3, 4, 1.0));
    EXPECT_TRUE(single.pass);
    EXPECT_TRUE(single.differences.empty());
}

TEST(ModelProperties, VolumesPositiveAndIncreasing)
{
    for (const auto& p : all_params())
        for (const auto& g : random_grids(7u + static_cast<unsigned>(p.m), 6)) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                EXPECT_GT(sphere_volume(g[i], p), 0.0);
                EXPECT_GT(ball_volume(g[i], p), 0.0);
                if (i) {
                    EXPECT_GT(sphere_volume(g[i], p), sphere_volume(g[i - 1], p));
                    EXPECT_GT(ball_volume(g[i], p), ball_volume(g[i - 1], p));
                }
            }
        }
}

TEST(ModelProperties, ZNonNegativeAndNonDecreasing)
{
    for (const auto& p : all_params())
        for (const auto& g : random_grids(11u, 5))
            for (std::size_t i = 0; i < g.size(); ++i) {
                EXPECT_GE(comparison_z(g[i], p), 0.0);
                if (i) EXPECT_GE(comparison_z(g[i], p), comparison_z(g[i - 1], p) - 1e-12);
            }
}

TEST(ModelProperties, RatioMonotoneOnEveryGrid)
{
    for (const auto& p : all_params())
        for (const auto& g : random_grids(13u, 5)) EXPECT_TRUE(check_ratio_monotone(g, p).pass) << p.m << " " << p.k;
}

TEST(ModelProperties, GrowthRatioIdentity)
{
    for (int m : {2, 3, 6}) {
        const auto p = SpaceFormParams::make(m, m + 1, 0.0);
        for (double s : {0.01, 1.0, 33.0}) EXPECT_NEAR(volume_growth_ratio(s, p), (m - 1.0) / m, 1e-13);
        const auto h = SpaceFormParams::make(m, m + 1, 1.0);
        double prev = std::abs(volume_mismatch(5.0, h));
        for (double s : {10.0, 20.0, 40.0}) {
            const double cur = std::abs(volume_mismatch(s, h));
            EXPECT_LT(cur, prev);
            prev = cur;
        }
        EXPECT_LT(prev, 0.1);
    }
}
