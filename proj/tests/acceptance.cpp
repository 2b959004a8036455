// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "densitylab/densitylab.hpp"

using namespace densitylab;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

std::string num(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

Outcome ode_fidelity()
{
    Outcome o;
    for (double k : {0.0, 1.0}) {
        const auto t0 = Clock::now();
        const auto sol = solve_g(CurvatureProfile::constant(k), Grid::linspace(0.01, 20.0, 2000));
        const double dt = seconds_since(t0);
        double worst = 0.0;
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            worst = std::max(worst, std::abs(sol.g[i] - sn(sol.grid[i], k)) / sn(sol.grid[i], k));
        o.require(worst <= 1e-8, "k=" + num(k) + " max rel err " + num(worst));
        o.require(dt < 1.0, "runtime " + num(dt) + " s");
    }
    return o;
}

Outcome pinching_calculus()
{
    Outcome o;
    const auto prof = CurvatureProfile::exp_tail(1.0, 1.0, 1.0);
    const auto sol = solve_g(prof, Grid::linspace(0.01, 40.0, 2000));
    PinchingTolerances tol;
    tol.tail_start = 30.0;
    const auto rep = verify_pinching_limits(sol, tol, &prof);
    o.require(rep.zeta_nonnegative.measured >= 0.0, "min zeta " + num(rep.zeta_nonnegative.measured));
    o.require(rep.integral_tail.measured < 1e-6, "tail increment " + num(rep.integral_tail.measured));
    o.require(rep.scaled_tail.measured < 1e-4, "scaled zeta(40) " + num(rep.scaled_tail.measured));
    // g/sn on the tail window [30, 40] stable to 4 significant digits
    o.require(rep.ratio_stability.measured < 5e-5,
              "g/sn spread " + num(rep.ratio_stability.measured) + " limit " + num(rep.ratio_limit));
    return o;
}

Outcome coarea_consistency()
{
    Outcome o;
    const auto e = make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0));
    const auto a = annulus_volume(e, 0.5, 2.0);
    const double rel = std::abs(a.direct.value - a.coarea.value) / a.direct.value;
    o.require(rel <= 1e-5, "relative gap " + num(rel));
    return o;
}

Outcome monotonicity_suite()
{
    Outcome o;
    const auto e = make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0));
    const auto p = build_profile(e, Grid::linspace(1.05, 30.0, 200));
    const auto r = verify_monotonicity(p, e.params());
    for (const char* name : {"theta_nondecreasing", "energy_nondecreasing", "barj_nondecreasing",
                             "weighted_gap_nondecreasing", "flux_dominates_theta"}) {
        const auto* q = r.find(name);
        o.require(q && q->pass && q->checked, std::string(name) + (q ? " excess " + num(q->worst_excess) : " missing"));
    }
    const auto cone = make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0));
    const auto c = build_profile(cone, Grid::linspace(0.5, 50.0, 100));
    double dev = 0.0;
    for (double th : c.theta) dev = std::max(dev, std::abs(th - pi / 2));
    o.require(dev <= 1e-6, "cone |theta - pi/2| " + num(dev));
    return o;
}

Outcome equivalence_suite()
{
    Outcome o;
    const auto e = make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0));
    const auto p = build_profile(e, Grid::linspace(1.05, 30.0, 200));
    const auto r = equivalence_report(p, e.params());
    const double gap = std::abs(r.theta_limit_estimate - r.barj_limit_estimate) / r.theta_limit_estimate;
    o.require(gap <= 0.01, "theta/barj limits " + num(r.theta_limit_estimate) + "/" + num(r.barj_limit_estimate));
    // increment of the criterion integral beyond s = 20
    double at20 = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        if (p.grid[i] <= 20.0) at20 = r.tilt_criterion_partials[i];
    const double inc = r.tilt_criterion_partials.back() - at20;
    o.require(inc < 1e-4, "criterion tail increment " + num(inc) + " decay exponent " + num(r.tilt_criterion_decay_exponent));
    return o;
}

Outcome spectral_floor_check()
{
    Outcome o;
    const auto h = spectral_floor(make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 1.0)).params());
    o.require(h == 0.25, "hyperbolic plane floor " + num(h));
    for (const auto& e : {make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, 0.0)),
                          make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0)),
                          make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0))})
        o.require(spectral_floor(e.params()) == 0.0, std::string(to_string(e.id())) + " floor " + num(spectral_floor(e.params())));
    return o;
}

struct FamilyRun {
    std::vector<double> defects, qs, seconds;
};

FamilyRun run_family(double k, double lambda)
{
    const auto e = make_entry(EntryId::totally_geodesic, SpaceFormParams::make(2, 3, k));
    const double ts[] = {10, 20, 40, 80};
    FamilyRun f;
    for (const auto& w : window_family(k, ts)) {
        const ProbeConfig cfg{lambda, w.t, w.s, w.S};
        const auto t0 = Clock::now();
        const auto prof = build_profile(e, Grid::linspace(w.t - 1.0, w.S, 401));
        const auto r = run_probe(e, prof, cfg);
        f.seconds.push_back(seconds_since(t0));
        f.defects.push_back(r.defect);
        f.qs.push_back(r.q_value);
    }
    return f;
}

bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

std::string series(const std::vector<double>& v)
{
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + num(x);
    return s;
}

const FamilyRun& flat_family()
{
    static const FamilyRun f = run_family(0.0, 1.0);
    return f;
}

const FamilyRun& hyperbolic_family()
{
    static const FamilyRun f = run_family(1.0, 0.5);
    return f;
}

Outcome defect_decay()
{
    Outcome o;
    const std::pair<const FamilyRun*, double> runs[] = {{&flat_family(), 1e-2}, {&hyperbolic_family(), 5e-2}};
    for (const auto& [f, threshold] : runs) {
        o.require(strictly_decreasing(f->defects), "defects " + series(f->defects));
        o.require(f->defects.back() <= threshold, "final " + num(f->defects.back()) + " vs " + num(threshold));
        double worst = 0.0;
        for (double s : f->seconds) worst = std::max(worst, s);
        o.require(worst < 5.0, "slowest window " + num(worst) + " s");
    }
    return o;
}

Outcome q_codecay()
{
    Outcome o;
    for (const FamilyRun* f : {&flat_family(), &hyperbolic_family()})
        o.require(strictly_decreasing(f->qs), "Q " + series(f->qs));
    return o;
}

Outcome flow_boundary()
{
    Outcome o;
    struct Case {
        IIDecayProfile prof;
        Finiteness expect;
        const char* name;
    };
    const Case cases[] = {
        {IIDecayProfile::euclidean(1.0, 2.0, 10.0), Finiteness::finite, "k=0 alpha=2"},
        {IIDecayProfile::euclidean(1.0, 1.0, 10.0), Finiteness::infinite, "k=0 alpha=1"},
        {IIDecayProfile::hyperbolic(1.0, 1.0, 2.0, 10.0), Finiteness::finite, "k=1 alpha=2"},
    };
    for (const auto& c : cases) {
        auto b = integrate_flow_bound(c.prof, 1e6);
        const auto r = finite_density_criterion(b, SpaceFormParams::make(2, 3, c.prof.k));
        o.require(r.verdict == c.expect, std::string(c.name) + " " + std::string(to_string(r.verdict)));
        if (c.expect == Finiteness::finite)
            o.require(b.c_hat_variation < 0.2, std::string(c.name) + " C variation " + num(b.c_hat_variation));
    }
    return o;
}

Outcome appendix_checks()
{
    Outcome o;
    const auto e = make_entry(EntryId::hyperbolic_plane_poincare, SpaceFormParams::make(2, 3, 1.0), 0.5);
    double worst = 0.0;
    const auto [lo, hi] = e.profile_range();
    for (int i = 1; i <= 60; ++i) {
        const double rho = lo + (std::min(hi, 15.0) - lo) * i / 61.0;
        for (int j = 0; j < 12; ++j)
            worst = std::max(worst, std::abs(e.conformal_identity_residual(std::vector<double>{rho, 2 * pi * j / 12.0})));
    }
    o.require(worst <= 1e-6, "conformal residual " + num(worst));

    bool mono = true;
    for (int m : {2, 3, 6})
        for (double k : {0.0, 1.0})
            mono = mono && check_ratio_monotone(Grid::logspace(1e-3, 50.0, 400), SpaceFormParams::make(m, m + 1, k)).pass;
    o.require(mono, "V/v monotone");

    const auto cone = make_entry(EntryId::euclidean_cone_clifford, SpaceFormParams::make(3, 4, 0.0));
    double dc = 0.0, dt = 0.0;
    for (double s : {0.5, 2.0, 10.0, 40.0}) {
        dc = std::max(dc, std::abs(intrinsic_density(cone, s) - pi / 2));
        for (double k : {0.0, 1.0})
            for (int m : {2, 3}) {
                const auto tg = make_entry(EntryId::totally_geodesic, SpaceFormParams::make(m, m + 1, k));
                dt = std::max(dt, std::abs(intrinsic_density(tg, s) - 1.0));
            }
    }
    o.require(dc <= 1e-6, "cone intrinsic deviation " + num(dc));
    o.require(dt <= 1e-6, "totally geodesic intrinsic deviation " + num(dt));
    return o;
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"ode fidelity", ode_fidelity},
        {"pinching calculus", pinching_calculus},
        {"coarea consistency", coarea_consistency},
        {"monotonicity suite", monotonicity_suite},
        {"equivalence suite", equivalence_suite},
        {"spectral floor", spectral_floor_check},
        {"defect decay", defect_decay},
        {"Q co-decay", q_codecay},
        {"flow boundary", flow_boundary},
        {"appendix checks", appendix_checks},
    };
    int failures = 0;
    int id = 0;
    for (const auto& [name, run] : criteria) {
        ++id;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", id - failures, id);
    return failures;
}
