#pragma once

// Command-line front end. Every subcommand emits a JSON document holding the
// resolved configuration and its results; CSV artifacts go to --out.
// Exit codes: 0 all verdicts pass, 2 a verdict failed, 1 usage or configuration error.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "densitylab/densitylab.hpp"

namespace densitylab::cli {

inline constexpr const char* kVersion = "1.0.0";

enum Exit : int { exit_ok = 0, exit_usage = 1, exit_verdict = 2 };

using io::json;

struct Outcome {
    bool pass = true;
    json doc;
};

// ---- option groups ----

struct SpaceOpts {
    std::optional<int> m, n;
    std::optional<double> k;

    void add(CLI::App* sc)
    {
        sc->add_option("--m", m, "intrinsic dimension");
        sc->add_option("--n", n, "ambient dimension");
        sc->add_option("--k", k, "ambient curvature is -k");
    }
};

struct EntryOpts {
    std::string entry = "euclidean_catenoid";
    SpaceOpts space;
    double offset = 0.0;

    void add(CLI::App* sc, const std::string& def)
    {
        entry = def;
        sc->add_option("--entry", entry, "catalog entry id")->capture_default_str();
        space.add(sc);
        sc->add_option("--offset", offset, "pole offset from the submanifold")->capture_default_str();
    }

    [[nodiscard]] EntryId id() const { return parse_entry_id(entry); }

    [[nodiscard]] SpaceFormParams params() const
    {
        int m = 2, n = 3;
        double k = 0.0;
        switch (id()) {
        case EntryId::euclidean_cone_clifford: m = 3, n = 4; break;
        case EntryId::hyperbolic_plane_poincare: k = 1.0; break;
        default: break;
        }
        if (space.m) m = *space.m, n = m + 1;
        if (space.n) n = *space.n;
        if (space.k) k = *space.k;
        return SpaceFormParams::make(m, n, k);
    }

    [[nodiscard]] CatalogEntry make() const { return make_entry(id(), params(), offset); }

    [[nodiscard]] json to_json() const
    {
        return {{"entry", entry}, {"params", io::to_json(params())}, {"offset", io::num(offset)}};
    }
};

struct QuadOpts {
    double tol = 1e-10;
    double exclusion = 1e-3;

    void add(CLI::App* sc)
    {
        sc->add_option("--quad-tol", tol, "relative quadrature tolerance")->capture_default_str();
        sc->add_option("--exclusion", exclusion, "exclusion radius around critical levels")->capture_default_str();
    }
    [[nodiscard]] QuadratureSettings settings() const { return {tol, exclusion, kDefaultQuadDepth}; }
    [[nodiscard]] json to_json() const { return {{"quad_tol", io::num(tol)}, {"exclusion_radius", io::num(exclusion)}}; }
};

struct CurvatureOpts {
    std::string form = "none";
    double c = 1.0, p = 2.0, a = 1.0;
    std::string file;
    double rtol = 1e-10, atol = 1e-14;

    void add(CLI::App* sc, const std::string& def)
    {
        form = def;
        sc->add_option("--curvature", form, "curvature bound G: none, constant, power, exp, tabulated")
            ->capture_default_str();
        sc->add_option("--c", c, "amplitude: G = k + c, k + c(1+s)^-p or k + c e^{-as}")->capture_default_str();
        sc->add_option("--p", p, "power-tail exponent")->capture_default_str();
        sc->add_option("--a", a, "exponential-tail rate")->capture_default_str();
        sc->add_option("--file", file, "two-column (s, G) table for the tabulated form");
        sc->add_option("--ode-rtol", rtol, "ODE relative tolerance")->capture_default_str();
        sc->add_option("--ode-atol", atol, "ODE absolute tolerance")->capture_default_str();
    }

    [[nodiscard]] std::optional<CurvatureProfile> make(double k) const
    {
        if (form == "none") return std::nullopt;
        if (form == "constant") return CurvatureProfile::constant(k, c);
        if (form == "power") return CurvatureProfile::power_tail(k, c, p);
        if (form == "exp") return CurvatureProfile::exp_tail(k, c, a);
        if (form == "tabulated") {
            if (file.empty()) throw ConfigError("--curvature tabulated needs --file");
            return CurvatureProfile::load_tabulated(file, k);
        }
        throw ConfigError("unknown curvature form '" + form + "'");
    }

    [[nodiscard]] OdeSettings settings() const
    {
        OdeSettings s;
        s.rel_tol = rtol;
        s.abs_tol = atol;
        return s;
    }

    [[nodiscard]] json to_json() const
    {
        json j = {{"form", form}};
        if (form == "constant" || form == "power" || form == "exp") j["c"] = io::num(c);
        if (form == "power") j["p"] = io::num(p);
        if (form == "exp") j["a"] = io::num(a);
        if (form == "tabulated") j["file"] = file;
        if (form != "none") j["ode_rel_tol"] = io::num(rtol), j["ode_abs_tol"] = io::num(atol);
        return j;
    }
};

struct OutOpts {
    std::string csv, json_path;
    bool table = false;

    void add(CLI::App* sc, bool with_table = false)
    {
        sc->add_option("--out", csv, "CSV output path");
        sc->add_option("--json", json_path, "JSON output path (stdout when omitted)");
        if (with_table) sc->add_flag("--table", table, "print a human-readable table to stdout");
    }
};

inline json envelope(const std::string& command, json config, json result, bool pass)
{
    return {{"tool", "densitylab"}, {"version", kVersion}, {"command", command},
            {"config", std::move(config)}, {"pass", pass}, {"result", std::move(result)}};
}

inline void write_csv(const io::CsvTable& t, const std::string& path)
{
    if (path.empty()) return;
    auto os = io::open_output(path);
    t.write(os);
    if (!os) throw ConfigError("failed writing '" + path + "'");
}

inline void emit(const Outcome& o, const OutOpts& out, std::ostream& os, bool quiet = false)
{
    if (!out.json_path.empty()) {
        auto f = io::open_output(out.json_path);
        f << o.doc.dump(2) << '\n';
        if (!f) throw ConfigError("failed writing '" + out.json_path + "'");
    } else if (!quiet) {
        os << o.doc.dump(2) << '\n';
    }
}

// ---- subcommands ----

struct ModelsOpts {
    int m = 2;
    double k = 0.0;
    std::string grid = "0.01:20:200";
    OutOpts out;
};

[[nodiscard]] inline Outcome run_models(const ModelsOpts& o)
{
    const auto p = SpaceFormParams::make(o.m, o.m + 1, o.k);
    const auto g = Grid::parse(o.grid);
    io::CsvTable t;
    t.add_meta("schema", "densitylab.models/1");
    io::add_space_meta(t, p);
    t.columns = {"s", "sn", "cn", "ball_volume", "sphere_volume", "volume_ratio", "f", "z", "growth_ratio",
                 "volume_mismatch", "a", "quad_tol"};
    for (double s : g)
        t.rows.push_back({io::fmt(s), io::fmt(sn(s, p.k)), io::fmt(cn(s, p.k)), io::fmt(ball_volume(s, p)),
                          io::fmt(sphere_volume(s, p)), io::fmt(volume_ratio(s, p)), io::fmt(comparison_f(s, p)),
                          io::fmt(comparison_z(s, p)), io::fmt(volume_growth_ratio(s, p)),
                          io::fmt(volume_mismatch(s, p)), io::fmt(spectral_weight_a(s, p)), io::fmt(kModelQuadTol)});
    write_csv(t, o.out.csv);
    const auto mono = check_ratio_monotone(g, p);
    json res = {{"spectral_floor", io::num(spectral_floor(p))},
                {"unit_sphere_area", io::num(unit_sphere_area(p.m))},
                {"ratio_monotone", {{"pass", mono.pass}, {"min_difference", io::num(mono.min_difference)},
                                    {"tolerance", io::num(mono.tolerance)}}}};
    json cfg = {{"params", io::to_json(p)}, {"grid", o.grid}, {"quad_tol", io::num(kModelQuadTol)}};
    return {mono.pass, envelope("models", cfg, res, mono.pass)};
}

struct OdeOpts {
    double k = 0.0;
    CurvatureOpts curvature;
    std::string grid = "0.01:40:400";
    std::optional<double> tail_start;
    OutOpts out;
};

[[nodiscard]] inline Outcome run_ode(const OdeOpts& o)
{
    const auto prof = o.curvature.make(o.k);
    if (!prof) throw ConfigError("ode needs a curvature form other than none");
    const auto g = Grid::parse(o.grid);
    const auto sol = solve_g(*prof, g, o.curvature.settings());
    write_csv(io::comparison_table(sol), o.out.csv);
    PinchingTolerances tol;
    tol.tail_start = o.tail_start;
    const auto rep = verify_pinching_limits(sol, tol, &*prof);
    bool pass = rep.structural_pass();
    const bool integral = rep.classification
        && (*rep.classification == Pinching::integral || *rep.classification == Pinching::both);
    if (integral) pass = pass && rep.tail_pass();
    json cfg = {{"k", io::num(o.k)}, {"curvature", o.curvature.to_json()}, {"grid", o.grid}};
    if (o.tail_start) cfg["tail_start"] = io::num(*o.tail_start);
    return {pass, envelope("ode", cfg, io::to_json(rep), pass)};
}

struct DensityOpts {
    EntryOpts entry;
    std::string grid;
    QuadOpts quad;
    OutOpts out;
};

[[nodiscard]] inline Outcome run_density(const DensityOpts& o, RadialProfile* keep = nullptr)
{
    const auto e = o.entry.make();
    const auto prof = build_profile(e, Grid::parse(o.grid), o.quad.settings());
    write_csv(io::profile_table(prof), o.out.csv);
    std::size_t failed = 0;
    for (const auto& a : prof.annotations) failed += a.empty() ? 0 : 1;
    json cfg = o.entry.to_json();
    cfg["grid"] = o.grid;
    cfg.update(o.quad.to_json());
    json res = io::to_json(prof);
    res["failed_samples"] = failed;
    if (keep) *keep = prof;
    return {failed == 0, envelope("density", cfg, res, failed == 0)};
}

struct MonotoneOpts {
    std::string profile;
    EntryOpts entry;
    std::string grid;
    QuadOpts quad;
    CurvatureOpts curvature;
    double rel_tol = 1e-6;
    double tail_start = 20.0;
    OutOpts out;
};

inline void print_table(std::ostream& os, const MonotoneReport& r)
{
    os << std::left << std::setw(30) << "quantity" << std::setw(8) << "pass" << std::setw(26) << "worst_violation"
       << "bound_at_worst\n";
    for (const auto& q : r.quantities)
        os << std::setw(30) << q.name << std::setw(8) << (q.checked ? (q.pass ? "yes" : "NO") : "n/a") << std::setw(26)
           << io::fmt(q.worst_violation) << io::fmt(q.bound_at_worst) << '\n';
    os << (r.pass() ? "all pass" : "FAILED") << (r.low_confidence ? " (low confidence)" : "") << '\n';
}

[[nodiscard]] inline Outcome run_monotone(const MonotoneOpts& o, std::ostream& os)
{
    RadialProfile prof;
    json cfg;
    if (!o.profile.empty()) {
        if (!o.grid.empty()) throw ConfigError("use either --profile or --grid, not both");
        prof = io::load_profile_csv(o.profile);
        cfg["profile"] = o.profile;
    } else {
        if (o.grid.empty()) throw ConfigError("monotone needs --profile or --grid");
        prof = build_profile(o.entry.make(), Grid::parse(o.grid), o.quad.settings());
        cfg = o.entry.to_json();
        cfg["grid"] = o.grid;
        cfg.update(o.quad.to_json());
    }
    const auto& p = prof.params;
    std::optional<ComparisonSolution> sol;
    std::optional<Pinching> pin;
    if (const auto curv = o.curvature.make(p.k)) {
        sol = solve_g(*curv, prof.grid, o.curvature.settings());
        pin = classify_pinching(*curv);
    }
    MonotoneSettings ms;
    ms.rel_tol = o.rel_tol;
    EquivalenceSettings es;
    es.tail_start = o.tail_start;
    const auto mono = verify_monotonicity(prof, p, sol ? &*sol : nullptr, ms);
    const auto eq = equivalence_report(prof, p, sol ? &*sol : nullptr, pin, es);
    if (o.out.table) print_table(os, mono);
    cfg["curvature"] = o.curvature.to_json();
    cfg["rel_tol"] = io::num(o.rel_tol);
    cfg["tail_start"] = io::num(o.tail_start);
    cfg["profile_quad_tol"] = io::num(prof.quad_tol);
    json res = {{"monotone", io::to_json(mono)}, {"equivalence", io::to_json(eq)}};
    return {mono.pass(), envelope("monotone", cfg, res, mono.pass())};
}

struct SpectrumOpts {
    EntryOpts entry;
    std::vector<double> lambdas{1.0};
    std::vector<double> ts{10.0, 20.0, 40.0, 80.0};
    double s_factor = 2.0;
    std::string outer = "auto";
    double delta = 0.1;
    std::optional<double> threshold;
    std::size_t profile_samples = 401;
    QuadOpts quad;
    CurvatureOpts curvature;
    OutOpts out;
};

[[nodiscard]] inline Outcome run_spectrum(const SpectrumOpts& o)
{
    const auto e = o.entry.make();
    const auto& p = e.params();
    if (o.ts.empty() || o.lambdas.empty()) throw ConfigError("spectrum needs at least one t and one lambda");
    if (!(o.s_factor > 1.0)) throw ConfigError("--s-factor must be > 1");
    if (o.outer != "auto" && o.outer != "sqrt" && o.outer != "unit") throw ConfigError("--outer must be auto, sqrt or unit");
    const bool sqrt_outer = o.outer == "sqrt" || (o.outer == "auto" && p.k == 0.0);
    const auto curv = o.curvature.make(p.k);

    io::CsvTable t;
    t.add_meta("schema", "densitylab.spectrum/1");
    t.add_meta("entry", o.entry.entry);
    io::add_space_meta(t, p);
    t.columns = {"lambda", "t", "s", "S", "defect", "defect_error", "q", "quad_tol"};

    bool pass = true;
    json per_lambda = json::array();
    for (double lam : o.lambdas) {
        json rows = json::array();
        std::vector<double> defects, qs;
        for (double tt : o.ts) {
            const double s = o.s_factor * tt;
            ProbeConfig cfg{lam, tt, s, sqrt_outer ? s + std::sqrt(s) : s + 1.0};
            const auto grid = Grid::linspace(cfg.t - 1.0, cfg.S, o.profile_samples);
            const auto prof = build_profile(e, grid, o.quad.settings());
            std::optional<ComparisonSolution> sol;
            if (curv) sol = solve_g(*curv, grid, o.curvature.settings());
            const auto r = run_probe(e, prof, cfg, o.delta, sol ? &*sol : nullptr, o.quad.settings());
            defects.push_back(r.defect);
            qs.push_back(r.q_value);
            rows.push_back(io::to_json(r));
            t.rows.push_back({io::fmt(lam), io::fmt(cfg.t), io::fmt(cfg.s), io::fmt(cfg.S), io::fmt(r.defect),
                              io::fmt(r.defect_error), io::fmt(r.q_value), io::fmt(o.quad.tol)});
        }
        auto decreasing = [](const std::vector<double>& v) {
            for (std::size_t i = 1; i < v.size(); ++i)
                if (!(v[i] < v[i - 1])) return false;
            return true;
        };
        const bool dd = decreasing(defects), qd = decreasing(qs);
        const bool below = !o.threshold || defects.back() <= *o.threshold;
        pass = pass && dd && qd && below;
        json item = {{"lambda", io::num(lam)}, {"beta", io::num(beta(lam, p))}, {"windows", rows},
                     {"defect_decreasing", dd}, {"q_decreasing", qd}, {"final_defect", io::num(defects.back())}};
        if (o.threshold) item["below_threshold"] = below;
        per_lambda.push_back(item);
    }
    write_csv(t, o.out.csv);

    json cfg = o.entry.to_json();
    cfg["lambda"] = io::to_json(o.lambdas);
    cfg["t"] = io::to_json(o.ts);
    cfg["s_factor"] = io::num(o.s_factor);
    cfg["outer"] = sqrt_outer ? "sqrt" : "unit";
    cfg["delta"] = io::num(o.delta);
    cfg["threshold"] = o.threshold ? io::num(*o.threshold) : json(nullptr);
    cfg["profile_samples"] = o.profile_samples;
    cfg["cutoff_constant"] = io::num(kCutoffConstant);
    cfg["curvature"] = o.curvature.to_json();
    cfg.update(o.quad.to_json());
    json res = {{"spectral_floor", io::num(spectral_floor(p))}, {"probes", per_lambda}};
    return {pass, envelope("spectrum", cfg, res, pass)};
}

struct FlowOpts {
    std::string regime = "euclidean";
    std::string form = "log_power";
    double c = 1.0, alpha = 2.0, R = 10.0;
    std::optional<double> k;
    double ii_norm = 0.0;
    int m = 2;
    double s_max = 1e6;
    std::size_t samples_per_decade = 64;
    OutOpts out;
};

[[nodiscard]] inline Outcome run_flow(const FlowOpts& o)
{
    const Regime reg = parse_regime(o.regime);
    const double k = o.k ? *o.k : (reg == Regime::euclidean ? 0.0 : 1.0);
    IIDecayProfile prof;
    if (o.form == "log_power") {
        prof = reg == Regime::euclidean ? IIDecayProfile::euclidean(o.c, o.alpha, o.R)
                                        : IIDecayProfile::hyperbolic(k, o.c, o.alpha, o.R);
    } else if (o.form == "constant") {
        prof = IIDecayProfile::constant(k, o.ii_norm, o.R);
    } else {
        throw ConfigError("unknown decay form '" + o.form + "' (expected log_power or constant)");
    }
    const auto p = SpaceFormParams::make(o.m, o.m + 1, k);
    const auto gate = properness_gate(prof);
    FlowSettings fs;
    fs.samples_per_decade = o.samples_per_decade;
    auto b = integrate_flow_bound(prof, o.s_max, fs);
    const auto crit = finite_density_criterion(b, p);
    write_csv(io::flow_table(b), o.out.csv);
    const bool pass = gate.pass && crit.verdict == Finiteness::finite;
    json cfg = {{"regime", o.regime}, {"form", o.form},   {"c", io::num(o.c)},         {"alpha", io::num(o.alpha)},
                {"R", io::num(o.R)},   {"k", io::num(k)}, {"m", o.m},                   {"s_max", io::num(o.s_max)},
                {"samples_per_decade", o.samples_per_decade}, {"quad_tol", io::num(fs.rel_tol)},
                {"finite_exponent", io::num(fs.finite_exponent)}, {"divergent_exponent", io::num(fs.divergent_exponent)}};
    if (o.form == "constant") cfg["ii_norm"] = io::num(o.ii_norm);
    json res = {{"gate", io::to_json(gate)}, {"flow", io::to_json(b)}, {"criterion", io::to_json(crit)}};
    return {pass, envelope("flow", cfg, res, pass)};
}

struct AllOpts {
    std::string out_dir = "densitylab_out";
};

[[nodiscard]] inline Outcome run_all(const AllOpts& o, std::ostream& os)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + o.out_dir + "': " + ec.message());
    auto path = [&](const char* name) { return (fs::path(o.out_dir) / name).string(); };

    json steps = json::array();
    bool pass = true;
    auto record = [&](const std::string& name, const Outcome& r, const char* file) {
        auto f = io::open_output(path(file));
        f << r.doc.dump(2) << '\n';
        steps.push_back({{"step", name}, {"pass", r.pass}, {"json", file}});
        pass = pass && r.pass;
        os << std::left << std::setw(28) << name << (r.pass ? "pass" : "FAIL") << '\n';
    };

    for (double k : {0.0, 1.0}) {
        ModelsOpts mo;
        mo.k = k;
        mo.out.csv = path(k == 0.0 ? "models_k0.csv" : "models_k1.csv");
        record(k == 0.0 ? "models k=0" : "models k=1", run_models(mo), k == 0.0 ? "models_k0.json" : "models_k1.json");
    }
    OdeOpts oo;
    oo.k = 1.0;
    oo.curvature.form = "exp";
    oo.curvature.c = 1.0;
    oo.curvature.a = 1.0;
    oo.out.csv = path("ode.csv");
    record("ode k=1 exp tail", run_ode(oo), "ode.json");

    DensityOpts d;
    d.entry.entry = "euclidean_catenoid";
    d.grid = "1.05:30:200";
    d.out.csv = path("catenoid_profile.csv");
    record("density catenoid", run_density(d), "catenoid_profile.json");

    MonotoneOpts mo;
    mo.profile = path("catenoid_profile.csv");
    std::ostringstream sink;
    record("monotone catenoid", run_monotone(mo, sink), "monotone.json");

    SpectrumOpts so;
    so.entry.entry = "totally_geodesic";
    so.out.csv = path("spectrum_k0.csv");
    record("spectrum k=0", run_spectrum(so), "spectrum_k0.json");
    so.entry.space.k = 1.0;
    so.lambdas = {0.5};
    so.out.csv = path("spectrum_k1.csv");
    record("spectrum k=1", run_spectrum(so), "spectrum_k1.json");

    FlowOpts fo;
    fo.out.csv = path("flow_euclidean.csv");
    record("flow euclidean alpha=2", run_flow(fo), "flow_euclidean.json");
    fo.regime = "hyperbolic";
    fo.out.csv = path("flow_hyperbolic.csv");
    record("flow hyperbolic alpha=2", run_flow(fo), "flow_hyperbolic.json");

    json cfg = {{"out_dir", o.out_dir}};
    return {pass, envelope("all", cfg, {{"steps", steps}}, pass)};
}

// ---- entry point ----

[[nodiscard]] inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
                             std::ostream& err = std::cerr)
{
    CLI::App app{"Numerical checks of density, monotonicity, spectral and decay properties of minimal submanifolds"};
    app.name("densitylab");
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "INI/TOML file with one section per subcommand; flags override it");
    app.require_subcommand(1);
    app.allow_config_extras(CLI::config_extras_mode::error);

    ModelsOpts models;
    auto* sm = app.add_subcommand("models", "model space functions and the V/v monotonicity check");
    sm->add_option("--m", models.m, "intrinsic dimension")->capture_default_str();
    sm->add_option("--k", models.k, "ambient curvature is -k")->capture_default_str();
    sm->add_option("--grid", models.grid, "a:b:n or log:a:b:n")->capture_default_str();
    models.out.add(sm);

    OdeOpts ode;
    auto* so = app.add_subcommand("ode", "comparison ODE g'' = G g and pinching checks");
    so->add_option("--k", ode.k, "space form curvature parameter")->capture_default_str();
    ode.curvature.add(so, "constant");
    so->add_option("--grid", ode.grid, "a:b:n or log:a:b:n")->capture_default_str();
    so->add_option("--tail-start", ode.tail_start, "start of the tail window");
    ode.out.add(so);

    DensityOpts dens;
    auto* sd = app.add_subcommand("density", "radial profiles Theta, J, Jbar, T, E of a catalog entry");
    dens.entry.add(sd, "euclidean_catenoid");
    sd->add_option("--grid", dens.grid, "a:b:n or log:a:b:n")->required();
    dens.quad.add(sd);
    dens.out.add(sd);

    MonotoneOpts mono;
    auto* smo = app.add_subcommand("monotone", "monotonicity and equivalence checks on a profile");
    smo->add_option("--profile", mono.profile, "profile CSV written by density");
    mono.entry.add(smo, "euclidean_catenoid");
    smo->add_option("--grid", mono.grid, "build the profile on this grid instead of reading one");
    mono.quad.add(smo);
    mono.curvature.add(smo, "none");
    smo->add_option("--rel-tol", mono.rel_tol, "relative slack on monotonicity checks")->capture_default_str();
    smo->add_option("--tail-start", mono.tail_start, "tail start for the tilt integral")->capture_default_str();
    mono.out.add(smo, true);

    SpectrumOpts spec;
    auto* ssp = app.add_subcommand("spectrum", "Weyl-defect probes over a window family");
    spec.entry.add(ssp, "totally_geodesic");
    ssp->add_option("--lambda", spec.lambdas, "probe eigenvalues")->delimiter(',')->capture_default_str();
    ssp->add_option("--t", spec.ts, "inner window radii")->delimiter(',')->capture_default_str();
    ssp->add_option("--s-factor", spec.s_factor, "s = factor * t")->capture_default_str();
    ssp->add_option("--outer", spec.outer, "outer ramp: auto, sqrt (S = s + sqrt s) or unit (S = s + 1)")
        ->capture_default_str();
    ssp->add_option("--delta", spec.delta, "slack in c_k")->capture_default_str();
    ssp->add_option("--threshold", spec.threshold, "required bound on the final defect");
    ssp->add_option("--profile-samples", spec.profile_samples, "samples per window profile")->capture_default_str();
    spec.quad.add(ssp);
    spec.curvature.add(ssp, "none");
    spec.out.add(ssp);

    FlowOpts flow;
    auto* sf = app.add_subcommand("flow", "flow-line bound and finite-density criterion under |II| decay");
    sf->add_option("--regime", flow.regime, "euclidean or hyperbolic")->capture_default_str();
    sf->add_option("--form", flow.form, "log_power or constant")->capture_default_str();
    sf->add_option("--c", flow.c, "decay amplitude")->capture_default_str();
    sf->add_option("--alpha", flow.alpha, "log exponent")->capture_default_str();
    sf->add_option("--R", flow.R, "start radius")->capture_default_str();
    sf->add_option("--k", flow.k, "curvature parameter (default 0 or 1 by regime)");
    sf->add_option("--ii-norm", flow.ii_norm, "|II| for the constant form")->capture_default_str();
    sf->add_option("--m", flow.m, "intrinsic dimension")->capture_default_str();
    sf->add_option("--s-max", flow.s_max, "outer radius")->capture_default_str();
    sf->add_option("--samples-per-decade", flow.samples_per_decade, "log-grid density")->capture_default_str();
    flow.out.add(sf);

    AllOpts all;
    auto* sa = app.add_subcommand("all", "run the default suite and write every artifact");
    sa->add_option("--out-dir", all.out_dir, "artifact directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "densitylab: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        Outcome r;
        const OutOpts* dest = nullptr;
        if (sm->parsed()) r = run_models(models), dest = &models.out;
        else if (so->parsed()) r = run_ode(ode), dest = &ode.out;
        else if (sd->parsed()) r = run_density(dens), dest = &dens.out;
        else if (smo->parsed()) r = run_monotone(mono, out), dest = &mono.out;
        else if (ssp->parsed()) r = run_spectrum(spec), dest = &spec.out;
        else if (sf->parsed()) r = run_flow(flow), dest = &flow.out;
        else if (sa->parsed()) {
            r = run_all(all, out);
            auto f = io::open_output((std::filesystem::path(all.out_dir) / "summary.json").string());
            f << r.doc.dump(2) << '\n';
        }
        if (dest) emit(r, *dest, out, dest->table);
        if (!r.pass) err << "densitylab: verdict failed\n";
        return r.pass ? exit_ok : exit_verdict;
    } catch (const SpectralFloorError& e) {
        err << "densitylab: " << e.what() << '\n';
    } catch (const CriticalLevelError& e) {
        err << "densitylab: " << e.what() << '\n';
    } catch (const ConfigError& e) {
        err << "densitylab: configuration error: " << e.what() << '\n';
    } catch (const CapabilityError& e) {
        err << "densitylab: unsupported: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "densitylab: domain error: " << e.what() << '\n';
    } catch (const IntegrationFailure& e) {
        err << "densitylab: integration failed near s = " << e.last_s() << ": " << e.what() << '\n';
    }
    return exit_usage;
}

} // namespace densitylab::cli
