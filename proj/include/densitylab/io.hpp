#pragma once

// CSV and JSON serialization of profiles and reports. CSV numbers use 17
// significant digits so files round-trip exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "densitylab/comparison_ode.hpp"
#include "densitylab/decay_flow.hpp"
#include "densitylab/errors.hpp"
#include "densitylab/model_geometry.hpp"
#include "densitylab/monotonicity.hpp"
#include "densitylab/radial_profiles.hpp"
#include "densitylab/spectral_probe.hpp"

namespace densitylab::io {

using json = nlohmann::ordered_json;

inline constexpr int kCsvSchemaVersion = 1;

[[nodiscard]] inline std::string fmt(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[nodiscard]] inline double parse_double(const std::string& s)
{
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("malformed number '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
    return v;
}

/// Comma-separated table with "# key=value" metadata lines before the header row.
class CsvTable {
public:
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
    void add_meta(std::string key, double value) { add_meta(std::move(key), fmt(value)); }

    void write(std::ostream& os) const
    {
        for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
        write_row(os, columns);
        for (const auto& r : rows) write_row(os, r);
    }

    [[nodiscard]] static CsvTable read(std::istream& is)
    {
        CsvTable t;
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                const auto eq = line.find('=');
                if (eq == std::string::npos) continue;
                std::size_t b = 1;
                while (b < eq && line[b] == ' ') ++b;
                t.meta.emplace_back(line.substr(b, eq - b), line.substr(eq + 1));
                continue;
            }
            auto cells = split(line);
            if (t.columns.empty()) {
                t.columns = std::move(cells);
            } else {
                if (cells.size() != t.columns.size())
                    throw ConfigError("CSV row has " + std::to_string(cells.size()) + " cells, header has "
                                      + std::to_string(t.columns.size()));
                t.rows.push_back(std::move(cells));
            }
        }
        if (t.columns.empty()) throw ConfigError("CSV has no header row");
        return t;
    }

    [[nodiscard]] std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ConfigError("CSV is missing column '" + name + "'");
    }

    [[nodiscard]] const std::string* find_meta(const std::string& key) const
    {
        for (const auto& [k, v] : meta)
            if (k == key) return &v;
        return nullptr;
    }

private:
    static std::string quote(const std::string& c)
    {
        if (c.find_first_of(",\"\n") == std::string::npos) return c;
        std::string q = "\"";
        for (char ch : c) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + '"';
    }

    static void write_row(std::ostream& os, const std::vector<std::string>& r)
    {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << quote(r[i]);
        os << '\n';
    }

    static std::vector<std::string> split(const std::string& line)
    {
        std::vector<std::string> out;
        std::string cur;
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char ch = line[i];
            if (in_quotes) {
                if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (ch == '"') {
                    in_quotes = false;
                } else {
                    cur += ch;
                }
            } else if (ch == '"') {
                in_quotes = true;
            } else if (ch == ',') {
                out.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        out.push_back(std::move(cur));
        return out;
    }
};

/// Opens a file for writing or throws ConfigError naming the path.
[[nodiscard]] inline std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write output file '" + path + "'");
    os.precision(17);
    return os;
}

// ---- radial profiles ----

inline void add_space_meta(CsvTable& t, const SpaceFormParams& p)
{
    t.add_meta("m", std::to_string(p.m));
    t.add_meta("n", std::to_string(p.n));
    t.add_meta("k", p.k);
}

[[nodiscard]] inline CsvTable profile_table(const RadialProfile& prof)
{
    CsvTable t;
    t.add_meta("schema", "densitylab.profile/" + std::to_string(RadialProfile::schema_version));
    t.add_meta("entry", prof.entry);
    add_space_meta(t, prof.params);
    t.add_meta("pole_offset", prof.pole_offset);
    t.add_meta("exclusion_radius", prof.exclusion_radius);
    std::string crit;
    for (double c : prof.critical_levels) crit += (crit.empty() ? "" : ";") + fmt(c);
    t.add_meta("critical_levels", crit);
    t.columns = {"s",         "theta",      "flux_j",     "barj",       "tilt_t",       "energy_e",    "err_theta",
                 "err_flux_j", "err_barj", "err_tilt_t", "err_energy_e", "empty_level", "quad_tol",    "annotation"};
    for (std::size_t i = 0; i < prof.size(); ++i)
        t.rows.push_back({fmt(prof.grid[i]), fmt(prof.theta[i]), fmt(prof.flux_j[i]), fmt(prof.barj[i]),
                          fmt(prof.tilt_t[i]), fmt(prof.energy_e[i]), fmt(prof.err_theta[i]), fmt(prof.err_flux_j[i]),
                          fmt(prof.err_barj[i]), fmt(prof.err_tilt_t[i]), fmt(prof.err_energy_e[i]),
                          prof.empty_level[i] ? "1" : "0", fmt(prof.quad_tol), prof.annotations[i]});
    return t;
}

inline void write_profile_csv(std::ostream& os, const RadialProfile& prof) { profile_table(prof).write(os); }

[[nodiscard]] inline RadialProfile read_profile_csv(std::istream& is)
{
    const auto t = CsvTable::read(is);
    RadialProfile prof;
    auto meta = [&](const char* key) -> std::string {
        const auto* v = t.find_meta(key);
        if (!v) throw ConfigError(std::string("profile CSV is missing metadata '") + key + "'");
        return *v;
    };
    prof.entry = meta("entry");
    try {
        prof.params = SpaceFormParams::make(std::stoi(meta("m")), std::stoi(meta("n")), parse_double(meta("k")));
    } catch (const std::invalid_argument&) {
        throw ConfigError("profile CSV has malformed space-form metadata");
    }
    if (const auto* v = t.find_meta("pole_offset")) prof.pole_offset = parse_double(*v);
    if (const auto* v = t.find_meta("exclusion_radius")) prof.exclusion_radius = parse_double(*v);
    if (const auto* v = t.find_meta("critical_levels")) {
        std::stringstream ss(*v);
        std::string c;
        while (std::getline(ss, c, ';'))
            if (!c.empty()) prof.critical_levels.push_back(parse_double(c));
    }
    if (t.rows.empty()) throw ConfigError("profile CSV has no rows");
    const std::size_t n = t.rows.size();
    std::vector<double> s(n);
    const auto cs = t.column("s");
    for (std::size_t i = 0; i < n; ++i) s[i] = parse_double(t.rows[i][cs]);
    prof.grid = Grid(std::move(s));
    prof.resize(n);
    const std::pair<const char*, std::vector<double>*> cols[] = {
        {"theta", &prof.theta},           {"flux_j", &prof.flux_j},         {"barj", &prof.barj},
        {"tilt_t", &prof.tilt_t},         {"energy_e", &prof.energy_e},     {"err_theta", &prof.err_theta},
        {"err_flux_j", &prof.err_flux_j}, {"err_barj", &prof.err_barj},     {"err_tilt_t", &prof.err_tilt_t},
        {"err_energy_e", &prof.err_energy_e}};
    for (const auto& [name, dst] : cols) {
        const auto c = t.column(name);
        for (std::size_t i = 0; i < n; ++i) (*dst)[i] = parse_double(t.rows[i][c]);
    }
    const auto cq = t.column("quad_tol");
    prof.quad_tol = parse_double(t.rows.front()[cq]);
    const auto ce = t.column("empty_level");
    const auto ca = t.column("annotation");
    for (std::size_t i = 0; i < n; ++i) {
        prof.empty_level[i] = t.rows[i][ce] == "1";
        prof.annotations[i] = t.rows[i][ca];
    }
    return prof;
}

[[nodiscard]] inline RadialProfile load_profile_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open profile file '" + path + "'");
    return read_profile_csv(is);
}

// ---- JSON ----

[[nodiscard]] inline json num(double x)
{
    // JSON has no NaN or infinity; encode them as strings so documents stay valid.
    if (std::isfinite(x)) return x;
    return fmt(x);
}

[[nodiscard]] inline json to_json(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

[[nodiscard]] inline json to_json(const SpaceFormParams& p) { return {{"m", p.m}, {"n", p.n}, {"k", num(p.k)}}; }

[[nodiscard]] inline json to_json(const RadialProfile& prof)
{
    json nudges = json::array();
    for (const auto& nd : prof.nudges)
        nudges.push_back({{"index", nd.index}, {"original", num(nd.original)}, {"adjusted", num(nd.adjusted)}});
    json empty = json::array();
    for (bool b : prof.empty_level) empty.push_back(b);
    return {{"schema", "densitylab.profile/" + std::to_string(RadialProfile::schema_version)},
            {"entry", prof.entry},
            {"params", to_json(prof.params)},
            {"pole_offset", num(prof.pole_offset)},
            {"quad_tol", num(prof.quad_tol)},
            {"exclusion_radius", num(prof.exclusion_radius)},
            {"critical_levels", to_json(prof.critical_levels)},
            {"s", to_json(prof.grid.values())},
            {"theta", to_json(prof.theta)},
            {"flux_j", to_json(prof.flux_j)},
            {"barj", to_json(prof.barj)},
            {"tilt_t", to_json(prof.tilt_t)},
            {"energy_e", to_json(prof.energy_e)},
            {"err_theta", to_json(prof.err_theta)},
            {"err_flux_j", to_json(prof.err_flux_j)},
            {"err_barj", to_json(prof.err_barj)},
            {"err_tilt_t", to_json(prof.err_tilt_t)},
            {"err_energy_e", to_json(prof.err_energy_e)},
            {"empty_level", empty},
            {"annotations", prof.annotations},
            {"nudges", nudges}};
}

[[nodiscard]] inline json to_json(const MonotoneReport& r)
{
    json q = json::array();
    for (const auto& v : r.quantities)
        q.push_back({{"name", v.name},
                     {"pass", v.pass},
                     {"checked", v.checked},
                     {"worst_violation", num(v.worst_violation)},
                     {"bound_at_worst", num(v.bound_at_worst)},
                     {"worst_excess", num(v.worst_excess)},
                     {"worst_index", v.worst_index},
                     {"samples", v.samples}});
    return {{"schema", "densitylab.monotone/1"}, {"pass", r.pass()}, {"low_confidence", r.low_confidence}, {"quantities", q}};
}

[[nodiscard]] inline json to_json(const TailFit& f)
{
    return {{"form", f.form}, {"limit", num(f.limit)}, {"amplitude", num(f.amplitude)}, {"rate", num(f.rate)},
            {"rms", num(f.rms)}, {"samples", f.samples}};
}

[[nodiscard]] inline json to_json(const EquivalenceReport& r)
{
    return {{"schema", "densitylab.equivalence/1"},
            {"theta_fit", to_json(r.theta_fit)},
            {"barj_fit", to_json(r.barj_fit)},
            {"theta_limit_estimate", num(r.theta_limit_estimate)},
            {"barj_limit_estimate", num(r.barj_limit_estimate)},
            {"tilt_criterion_integral", num(r.tilt_criterion_integral)},
            {"tilt_criterion_tail_increment", num(r.tilt_criterion_tail_increment)},
            {"tilt_criterion_decay_exponent", num(r.tilt_criterion_decay_exponent)},
            {"tail_start", num(r.tail_start)},
            {"tail_settled", r.tail_settled},
            {"theta_verdict", to_string(r.theta_verdict)},
            {"barj_verdict", to_string(r.barj_verdict)},
            {"tilt_criterion_verdict", to_string(r.tilt_criterion_verdict)},
            {"limits_ordered", r.limits_ordered},
            {"consistent", r.consistent},
            {"converse_checked", r.converse_checked},
            {"low_confidence", r.low_confidence}};
}

[[nodiscard]] inline json to_json(const PinchingCheck& c)
{
    return {{"pass", c.pass}, {"measured", num(c.measured)}, {"tolerance", num(c.tolerance)}};
}

[[nodiscard]] inline json to_json(const PinchingReport& r)
{
    return {{"schema", "densitylab.pinching/1"},
            {"structural_pass", r.structural_pass()},
            {"tail_pass", r.tail_pass()},
            {"zeta_nonnegative", to_json(r.zeta_nonnegative)},
            {"zeta_origin", to_json(r.zeta_origin)},
            {"ratio_nondecreasing", to_json(r.ratio_nondecreasing)},
            {"log_identity", to_json(r.log_identity)},
            {"integral_tail", to_json(r.integral_tail)},
            {"scaled_tail", to_json(r.scaled_tail)},
            {"ratio_stability", to_json(r.ratio_stability)},
            {"zeta_tail", num(r.zeta_tail)},
            {"zeta_integral_total", num(r.zeta_integral_total)},
            {"ratio_limit", num(r.ratio_limit)},
            {"tail_start", num(r.tail_start)},
            {"under_resolved", r.under_resolved},
            {"classification", r.classification ? json(std::string(to_string(*r.classification))) : json(nullptr)},
            {"classification_consistent", r.classification_consistent}};
}

[[nodiscard]] inline json to_json(const ProbeResult& r)
{
    return {{"lambda", num(r.config.lambda)}, {"t", num(r.config.t)},         {"s", num(r.config.s)},
            {"S", num(r.config.S)},           {"beta", num(r.beta)},          {"defect", num(r.defect)},
            {"defect_error", num(r.defect_error)}, {"norm_u", num(r.norm_u)}, {"q", num(r.q_value)},
            {"f_sup", num(r.f_sup)},          {"omega", num(r.omega)},        {"chi", num(r.chi)},
            {"c_hat", num(r.c_hat)},          {"c_k", num(r.c_k)}};
}

[[nodiscard]] inline json to_json(const GateVerdict& g)
{
    return {{"pass", g.pass}, {"limsup", num(g.limsup)}, {"threshold", num(g.threshold)}};
}

[[nodiscard]] inline json to_json(const CriterionReport& r)
{
    return {{"verdict", r.verdict == Finiteness::infinite ? "divergent" : std::string(to_string(r.verdict))},
            {"integral", num(r.integral)},
            {"last_decade_increment", num(r.last_decade_increment)},
            {"relative_increment", num(r.relative_increment)},
            {"decay_exponent", num(r.decay_exponent)},
            {"analytic_finite", r.analytic_finite},
            {"agrees_with_analytic", r.agrees_with_analytic},
            {"low_confidence", r.low_confidence}};
}

[[nodiscard]] inline json to_json(const FlowBound& b)
{
    json dec = json::array();
    for (const auto& d : b.decades)
        dec.push_back({{"lo", num(d.lo)}, {"hi", num(d.hi)}, {"c_hat", num(d.c_hat)}, {"samples", d.samples}});
    return {{"regime", to_string(b.profile.regime)},
            {"c", num(b.profile.c)},
            {"alpha", num(b.profile.alpha)},
            {"R", num(b.profile.R)},
            {"k", num(b.profile.k)},
            {"s_max", num(b.grid.back())},
            {"samples", b.grid.size()},
            {"c_hat", num(b.c_hat)},
            {"c_hat_variation", num(b.c_hat_variation)},
            {"decades", dec}};
}

[[nodiscard]] inline CsvTable flow_table(const FlowBound& b)
{
    CsvTable t;
    t.add_meta("schema", "densitylab.flow/1");
    t.add_meta("regime", std::string(to_string(b.profile.regime)));
    t.add_meta("c", b.profile.c);
    t.add_meta("alpha", b.profile.alpha);
    t.add_meta("R", b.profile.R);
    t.add_meta("k", b.profile.k);
    t.columns = {"s", "w", "envelope", "criterion_partial", "quad_tol"};
    for (std::size_t i = 0; i < b.grid.size(); ++i)
        t.rows.push_back({fmt(b.grid[i]), fmt(b.w[i]), fmt(b.envelope[i]),
                          fmt(i < b.criterion_partials.size() ? b.criterion_partials[i] : 0.0), fmt(b.settings.rel_tol)});
    return t;
}

[[nodiscard]] inline CsvTable comparison_table(const ComparisonSolution& sol)
{
    CsvTable t;
    t.add_meta("schema", "densitylab.ode/1");
    t.add_meta("k", sol.k);
    t.add_meta("launch", sol.launch);
    t.columns = {"s", "g", "g_prime", "g_second", "zeta", "zeta_prime", "zeta_integral", "ode_rel_tol", "ode_abs_tol"};
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        t.rows.push_back({fmt(sol.grid[i]), fmt(sol.g[i]), fmt(sol.g_prime[i]), fmt(sol.g_second[i]), fmt(sol.zeta[i]),
                          fmt(sol.zeta_prime[i]), fmt(sol.zeta_integral[i]), fmt(sol.settings.rel_tol),
                          fmt(sol.settings.abs_tol)});
    return t;
}

} // namespace densitylab::io
