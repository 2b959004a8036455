#include <cmath>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "densitylab/comparison_ode.hpp"

using namespace densitylab;

TEST(CurvatureProfile, RejectsInadmissibleBounds)
{
    EXPECT_THROW((void)CurvatureProfile::constant(1.0, -0.5), ConfigError);
    EXPECT_THROW((void)CurvatureProfile::power_tail(0.0, 1.0, 0.0), ConfigError);
    EXPECT_THROW((void)CurvatureProfile::exp_tail(0.0, 1.0, -1.0), ConfigError);
    EXPECT_THROW((void)CurvatureProfile::tabulated(1.0, {0.0, 1.0}, {1.0, 0.5}), ConfigError);
}

TEST(CurvatureProfile, LoadsTwoColumnTable)
{
    const std::string path = ::testing::TempDir() + "curv.txt";
    {
        std::ofstream f(path);
        f << "# s G\n0 2\n1 1.5 # mid\n\n2 1\n";
    }
    const auto p = CurvatureProfile::load_tabulated(path, 1.0);
    EXPECT_DOUBLE_EQ(p.G(0.5), 1.75);
    EXPECT_DOUBLE_EQ(p.G(5.0), 1.0);
    {
        std::ofstream f(path);
        f << "0 2\n1 x\n";
    }
    EXPECT_THROW((void)CurvatureProfile::load_tabulated(path, 1.0), ConfigError);
    std::remove(path.c_str());
}

TEST(SolveG, ConstantCurvatureReproducesSn)
{
    for (double k : {0.0, 1.0}) {
        const auto sol = solve_g(CurvatureProfile::constant(k), Grid::linspace(0.01, 20.0, 400));
        double worst = 0.0;
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            worst = std::max(worst, std::abs(sol.g[i] / sn(sol.grid[i], k) - 1.0));
        EXPECT_LE(worst, 1e-8) << "k=" << k;
        const auto rep = verify_pinching_limits(sol, {}, nullptr);
        EXPECT_TRUE(rep.structural_pass());
        EXPECT_NEAR(rep.ratio_limit, 1.0, 1e-8);
        EXPECT_NEAR(rep.zeta_integral_total, 0.0, 1e-8);
    }
}

TEST(SolveG, ExpTailGivesPositiveZetaAndConvergentTail)
{
    const auto prof = CurvatureProfile::exp_tail(1.0, 1.0, 1.0);
    const auto sol = solve_g(prof, Grid::linspace(0.01, 40.0, 800));
    for (std::size_t i = 0; i < sol.grid.size(); ++i) EXPECT_GE(sol.zeta[i], 0.0) << sol.grid[i];
    EXPECT_GT(sol.zeta[sol.grid.size() / 4], 0.0);
    PinchingTolerances tol;
    tol.tail_start = 30.0;
    const auto rep = verify_pinching_limits(sol, tol, &prof);
    EXPECT_TRUE(rep.structural_pass());
    EXPECT_TRUE(rep.integral_tail.pass);
    EXPECT_LT(rep.integral_tail.measured, 1e-6);
    EXPECT_LT(rep.scaled_tail.measured, 1e-4);
    EXPECT_TRUE(rep.ratio_stability.pass);
    EXPECT_EQ(*rep.classification, Pinching::both);
}

TEST(SolveG, PowerTailFlatRatioGrowsWithoutBound)
{
    // g'' = g/(1+s)^2 has solutions ~ (1+s)^phi with phi = (1+sqrt5)/2, so g/s is unbounded.
    const auto sol = solve_g(CurvatureProfile::power_tail(0.0, 1.0, 2.0), Grid::logspace(0.01, 1e4, 400));
    const double r3 = sol.g_at(1e3) / 1e3, r4 = sol.g.back() / 1e4;
    EXPECT_GT(r4 / r3, 1.0);
    EXPECT_NEAR(std::log(r4 / r3) / std::log(10.0), (std::sqrt(5.0) - 1.0) / 2.0, 0.02);
}

TEST(Pinching, ClassifierExamples)
{
    EXPECT_EQ(classify_pinching(CurvatureProfile::power_tail(0.0, 1.0, 2.0)), Pinching::pointwise);
    EXPECT_EQ(classify_pinching(CurvatureProfile::exp_tail(1.0, 1.0, 1.0)), Pinching::both);
    EXPECT_EQ(classify_pinching(CurvatureProfile::constant(0.0, 0.0)), Pinching::both);
    EXPECT_EQ(classify_pinching(CurvatureProfile::constant(1.0, 0.5)), Pinching::neither);
    EXPECT_EQ(classify_pinching(CurvatureProfile::power_tail(1.0, 1.0, 0.5)), Pinching::pointwise);
    EXPECT_EQ(classify_pinching(CurvatureProfile::power_tail(1.0, 1.0, 2.0)), Pinching::both);
}

TEST(Pinching, TabulatedTailFitIsReportedOrInconclusive)
{
    std::vector<double> s, g;
    for (int i = 0; i <= 400; ++i) {
        s.push_back(0.05 * i);
        g.push_back(1.0 + std::exp(-s.back()));
    }
    EXPECT_EQ(classify_pinching(CurvatureProfile::tabulated(1.0, s, g)), Pinching::both);
    std::vector<double> noisy = g;
    for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] = 1.0 + (i % 2 ? 1e-3 : 1e-9);
    EXPECT_EQ(classify_pinching(CurvatureProfile::tabulated(1.0, s, noisy)), Pinching::inconclusive);
}

TEST(PinchingProperties, ZetaSignRatioAndLogIdentity)
{
    const CurvatureProfile profs[] = {
        CurvatureProfile::constant(0.0, 0.3),        CurvatureProfile::constant(1.0, 0.0),
        CurvatureProfile::power_tail(0.0, 2.0, 1.5), CurvatureProfile::power_tail(1.0, 0.7, 3.0),
        CurvatureProfile::exp_tail(0.0, 1.0, 0.5),   CurvatureProfile::exp_tail(4.0, 2.0, 2.0)};
    for (const auto& p : profs) {
        const auto sol = solve_g(p, Grid::linspace(0.02, 12.0, 300));
        const auto rep = verify_pinching_limits(sol, {}, &p);
        EXPECT_TRUE(rep.zeta_nonnegative.pass) << to_string(p.form());
        EXPECT_TRUE(rep.zeta_origin.pass) << to_string(p.form());
        EXPECT_TRUE(rep.ratio_nondecreasing.pass) << to_string(p.form());
        EXPECT_TRUE(rep.log_identity.pass) << to_string(p.form()) << " " << rep.log_identity.measured;
        for (std::size_t i = 0; i < sol.grid.size(); ++i) EXPECT_GT(sol.g[i], 0.0);
    }
}

TEST(PinchingProperties, IntegralPinchingImpliesSettledTail)
{
    for (const auto& p : {CurvatureProfile::exp_tail(1.0, 1.0, 1.0), CurvatureProfile::power_tail(1.0, 1.0, 3.0)}) {
        const auto cls = classify_pinching(p);
        ASSERT_TRUE(cls == Pinching::integral || cls == Pinching::both);
        const auto sol = solve_g(p, Grid::linspace(0.01, 60.0, 600));
        PinchingTolerances tol;
        tol.tail_increment = 1e-3;
        tol.scaled_tail = 1e-2;
        tol.ratio_stability = 1e-3;
        const auto rep = verify_pinching_limits(sol, tol, &p);
        EXPECT_TRUE(rep.integral_tail.pass) << rep.integral_tail.measured;
        EXPECT_TRUE(rep.scaled_tail.pass) << rep.scaled_tail.measured;
    }
}

TEST(SolveG, InterpolationMatchesSamples)
{
    const auto sol = solve_g(CurvatureProfile::exp_tail(1.0, 1.0, 1.0), Grid::linspace(0.01, 10.0, 200));
    EXPECT_NEAR(sol.g_at(sol.grid[57]), sol.g[57], 1e-12 * sol.g[57]);
    const double mid = 0.5 * (sol.grid[57] + sol.grid[58]);
    EXPECT_GT(sol.g_at(mid), sol.g[57]);
    EXPECT_LT(sol.g_at(mid), sol.g[58]);
}
