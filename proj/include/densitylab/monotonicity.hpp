#pragma once

// Finite-difference checks of the monotone quantities of a radial profile and
// tail extrapolation of the density and flux limits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "densitylab/comparison_ode.hpp"
#include "densitylab/model_geometry.hpp"
#include "densitylab/radial_profiles.hpp"

namespace densitylab {

struct MonotoneSettings {
    double rel_tol = 1e-6;          ///< relative slack added to propagated quadrature error
    std::size_t min_samples = 10;   ///< fewer samples mark the report low-confidence
    double max_truncation = 0.1;    ///< relative truncation estimate above which derivatives are low-confidence
};

struct QuantityVerdict {
    std::string name;
    bool pass = true;
    bool checked = false;           ///< false when no sample qualified
    double worst_violation = 0.0;   ///< largest raw violation (>= 0)
    double bound_at_worst = 0.0;    ///< error bound it was compared against
    double worst_excess = 0.0;      ///< max(violation - bound), <= 0 on pass
    std::size_t worst_index = 0;
    std::size_t samples = 0;
};

struct MonotoneReport {
    std::vector<QuantityVerdict> quantities;
    bool low_confidence = false;

    [[nodiscard]] bool pass() const
    {
        return std::all_of(quantities.begin(), quantities.end(), [](const auto& q) { return q.pass; });
    }
    [[nodiscard]] const QuantityVerdict* find(std::string_view name) const
    {
        for (const auto& q : quantities)
            if (q.name == name) return &q;
        return nullptr;
    }
};

namespace detail {

class ViolationTracker {
public:
    explicit ViolationTracker(std::string name) { v_.name = std::move(name); }

    // violation > 0 means the inequality is broken by that much before tolerances
    void add(std::size_t i, double violation, double bound)
    {
        if (!std::isfinite(violation) || !std::isfinite(bound)) return;
        v_.checked = true;
        ++v_.samples;
        const double excess = violation - bound;
        if (first_ || excess > v_.worst_excess) {
            v_.worst_excess = excess;
            v_.worst_violation = std::max(0.0, violation);
            v_.bound_at_worst = bound;
            v_.worst_index = i;
            first_ = false;
        }
        if (excess > 0.0) v_.pass = false;
    }
    [[nodiscard]] QuantityVerdict done() const { return v_; }

private:
    QuantityVerdict v_;
    bool first_ = true;
};

inline QuantityVerdict check_nondecreasing(std::string name, const std::vector<double>& q,
                                           const std::vector<double>& err, const std::vector<double>& scale,
                                           double rel_tol)
{
    ViolationTracker t(std::move(name));
    for (std::size_t i = 1; i < q.size(); ++i) {
        const double bound = err[i] + err[i - 1] + rel_tol * std::max(scale[i], scale[i - 1]);
        t.add(i, q[i - 1] - q[i], bound);
    }
    return t.done();
}

// Three-point derivative at s[i] using neighbours i-w and i+w.
inline double centered(const std::vector<double>& s, const std::vector<double>& q, std::size_t i, std::size_t w)
{
    const double hm = s[i] - s[i - w], hp = s[i + w] - s[i];
    return (hm * hm * (q[i + w] - q[i]) + hp * hp * (q[i] - q[i - w])) / (hm * hp * (hm + hp));
}

} // namespace detail

/// Monotonicity of Theta, E, Jbar, V_k(Jbar - Theta), J >= Theta and the two differential inequalities.
[[nodiscard]] inline MonotoneReport verify_monotonicity(const RadialProfile& prof, const SpaceFormParams& p,
                                                        const ComparisonSolution* comparison = nullptr,
                                                        const MonotoneSettings& set = {})
{
    MonotoneReport rep;
    const auto& s = prof.grid.values();
    const std::size_t n = s.size();
    rep.low_confidence = n < set.min_samples;

    auto absv = [](const std::vector<double>& v) {
        std::vector<double> a(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
        return a;
    };

    rep.quantities.push_back(detail::check_nondecreasing("theta_nondecreasing", prof.theta, prof.err_theta, absv(prof.theta), set.rel_tol));
    rep.quantities.push_back(detail::check_nondecreasing("energy_nondecreasing", prof.energy_e, prof.err_energy_e, absv(prof.energy_e), set.rel_tol));
    rep.quantities.push_back(detail::check_nondecreasing("barj_nondecreasing", prof.barj, prof.err_barj, absv(prof.barj), set.rel_tol));

    {
        std::vector<double> gap(n), err(n), scale(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double V = ball_volume(s[i], p);
            gap[i] = V * (prof.barj[i] - prof.theta[i]);
            err[i] = V * (prof.err_barj[i] + prof.err_theta[i]);
            scale[i] = V * std::max(std::abs(prof.barj[i]), std::abs(prof.theta[i]));
        }
        rep.quantities.push_back(detail::check_nondecreasing("weighted_gap_nondecreasing", gap, err, scale, set.rel_tol));
    }

    {
        detail::ViolationTracker t("flux_dominates_theta");
        for (std::size_t i = 0; i < n; ++i) {
            if (prof.empty_level[i] || !prof.annotations[i].empty()) continue;
            const double bound = prof.err_flux_j[i] + prof.err_theta[i] + set.rel_tol * std::abs(prof.theta[i]);
            t.add(i, prof.theta[i] - prof.flux_j[i], bound);
        }
        rep.quantities.push_back(t.done());
    }

    // Differential inequalities at samples two steps away from both ends.
    if (n >= 5) {
        detail::ViolationTracker lower("barj_differential_lower");
        std::optional<detail::ViolationTracker> upper;
        std::vector<double> y;
        if (comparison) {
            upper.emplace("barj_differential_upper");
            y.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = std::pow(sn(s[i], p.k) / comparison->g_at(s[i]), p.m - 1) * prof.barj[i];
        }
        double worst_trunc = 0.0;
        for (std::size_t i = 2; i + 2 < n; ++i) {
            if (prof.empty_level[i] || !std::isfinite(prof.tilt_t[i])) continue;
            const double hmin = std::min(s[i] - s[i - 1], s[i + 1] - s[i]);
            const double cs = cn_over_sn(s[i], p.k);
            const double d1 = detail::centered(s, prof.barj, i, 1);
            const double trunc = std::abs(d1 - detail::centered(s, prof.barj, i, 2));
            const double prop = (prof.err_barj[i - 1] + 2.0 * prof.err_barj[i] + prof.err_barj[i + 1]) / hmin;
            const double rhs = p.m * cs * prof.tilt_t[i] * prof.barj[i];
            const double rhs_err = p.m * cs * (prof.err_tilt_t[i] * std::abs(prof.barj[i]) + std::abs(prof.tilt_t[i]) * prof.err_barj[i]);
            lower.add(i, rhs - d1, trunc + prop + rhs_err + set.rel_tol * (std::abs(d1) + std::abs(rhs)));
            if (std::abs(d1) > 0.0) worst_trunc = std::max(worst_trunc, trunc / std::abs(d1));

            if (upper) {
                const double lg = comparison->g_prime_at(s[i]) / comparison->g_at(s[i]);
                const double e1 = detail::centered(s, y, i, 1);
                const double tr = std::abs(e1 - detail::centered(s, y, i, 2));
                const double ratio = y[i] / std::max(prof.barj[i], std::numeric_limits<double>::min());
                const double pr = ratio * (prof.err_barj[i - 1] + 2.0 * prof.err_barj[i] + prof.err_barj[i + 1]) / hmin;
                const double r2 = p.m * lg * prof.tilt_t[i] * y[i];
                const double r2e = p.m * lg * (prof.err_tilt_t[i] * std::abs(y[i]) + std::abs(prof.tilt_t[i]) * ratio * prof.err_barj[i]);
                upper->add(i, e1 - r2, tr + pr + r2e + set.rel_tol * (std::abs(e1) + std::abs(r2)));
            }
        }
        if (worst_trunc > set.max_truncation) rep.low_confidence = true;
        rep.quantities.push_back(lower.done());
        if (upper) rep.quantities.push_back(upper->done());
    } else {
        rep.low_confidence = true;
    }
    return rep;
}

enum class Finiteness { finite, infinite, inconclusive };

[[nodiscard]] inline std::string_view to_string(Finiteness f)
{
    switch (f) {
    case Finiteness::finite: return "finite";
    case Finiteness::infinite: return "infinite";
    case Finiteness::inconclusive: return "inconclusive";
    }
    return "?";
}

/// q(s) ~ limit + amplitude * shape(s), shape = s^-rate, e^-rate s, log s or 1.
struct TailFit {
    std::string form = "none";
    double limit = 0.0;
    double amplitude = 0.0;
    double rate = 0.0;
    double rms = 0.0;
    std::size_t samples = 0;
};

struct EquivalenceSettings {
    double tail_start = 20.0;       ///< tilt-criterion tail increment measured beyond this radius
    double tail_tolerance = 1e-4;   ///< increment treated as settled below this
    double limit_tolerance = 1e-2;  ///< relative tolerance for Jbar(inf) >= Theta(inf)
    std::size_t min_tail_samples = 5;
};

struct EquivalenceReport {
    TailFit theta_fit, barj_fit;
    double theta_limit_estimate = 0.0;
    double barj_limit_estimate = 0.0;
    std::vector<double> tilt_criterion_partials; ///< cumulative int (sn'/sn) T from the first sample
    double tilt_criterion_integral = 0.0;
    double tilt_criterion_tail_increment = 0.0;
    double tilt_criterion_decay_exponent = 0.0; ///< h ~ s^-p fitted on the last decade
    double tail_start = 0.0;
    bool tail_settled = false;
    Finiteness theta_verdict = Finiteness::inconclusive;
    Finiteness barj_verdict = Finiteness::inconclusive;
    Finiteness tilt_criterion_verdict = Finiteness::inconclusive;
    bool limits_ordered = true;
    bool consistent = true;
    bool converse_checked = false;
    bool low_confidence = false;
};

namespace detail {

// Least squares for q = L + A f(s); returns rss.
inline double fit_affine(const std::vector<double>& f, const std::vector<double>& q, double& L, double& A)
{
    const double n = static_cast<double>(q.size());
    double sf = 0, sq = 0, sff = 0, sfq = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        sf += f[i];
        sq += q[i];
        sff += f[i] * f[i];
        sfq += f[i] * q[i];
    }
    const double det = n * sff - sf * sf;
    if (std::abs(det) <= 1e-300) {
        A = 0.0;
        L = sq / n;
    } else {
        A = (n * sfq - sf * sq) / det;
        L = (sq - A * sf) / n;
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double r = q[i] - L - A * f[i];
        rss += r * r;
    }
    return rss;
}

struct TailDecision {
    TailFit fit;
    Finiteness verdict = Finiteness::inconclusive;
};

inline TailDecision extrapolate_tail(const std::vector<double>& s, const std::vector<double>& q, std::size_t min_samples)
{
    TailDecision d;
    std::vector<double> ts, tq;
    const double s_from = 0.1 * s.back();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] >= s_from && std::isfinite(q[i])) {
            ts.push_back(s[i]);
            tq.push_back(q[i]);
        }
    d.fit.samples = ts.size();
    if (ts.size() < min_samples) return d;
    const double qN = tq.back();
    const double scale = std::max(std::abs(qN), 1e-300);

    const auto [lo, hi] = std::minmax_element(tq.begin(), tq.end());
    if ((*hi - *lo) <= 1e-9 * scale) {
        d.fit.form = "constant";
        d.fit.limit = qN;
        d.verdict = Finiteness::finite;
        return d;
    }

    std::vector<double> f(ts.size());
    double best = std::numeric_limits<double>::infinity();
    for (int j = 5; j <= 600; ++j) { // power rates 0.05 .. 6
        const double p = 0.01 * j;
        for (std::size_t i = 0; i < ts.size(); ++i) f[i] = std::pow(ts[i], -p);
        double L, A;
        const double rss = fit_affine(f, tq, L, A);
        if (rss < best) {
            best = rss;
            d.fit = {"power", L, A, p, 0.0, ts.size()};
        }
    }
    for (int j = 0; j <= 400; ++j) { // exponential rates spanning the tail window
        const double beta = std::exp(std::log(0.5) + (std::log(200.0) - std::log(0.5)) * j / 400.0) / ts.back();
        for (std::size_t i = 0; i < ts.size(); ++i) f[i] = std::exp(-beta * (ts[i] - ts.front()));
        double L, A;
        const double rss = fit_affine(f, tq, L, A);
        if (rss < best) {
            best = rss;
            d.fit = {"exponential", L, A, beta, 0.0, ts.size()};
        }
    }
    for (std::size_t i = 0; i < ts.size(); ++i) f[i] = std::log(ts[i]);
    double Lg, Ag;
    const double rss_log = fit_affine(f, tq, Lg, Ag);
    d.fit.rms = std::sqrt(best / ts.size());

    if (Ag > 0.0 && rss_log < 0.25 * best) {
        d.fit = {"log_growth", Lg, Ag, 0.0, std::sqrt(rss_log / ts.size()), ts.size()};
        d.verdict = Finiteness::infinite;
    } else if (std::abs(d.fit.limit - qN) <= 0.5 * scale) {
        d.verdict = Finiteness::finite;
    }
    return d;
}

} // namespace detail

/// Limits of Theta and Jbar and the criterion integral int (sn'/sn) T.
[[nodiscard]] inline EquivalenceReport equivalence_report(const RadialProfile& prof, const SpaceFormParams& p,
                                                          const ComparisonSolution* comparison = nullptr,
                                                          std::optional<Pinching> comparison_pinching = std::nullopt,
                                                          const EquivalenceSettings& set = {})
{
    EquivalenceReport r;
    const auto& s = prof.grid.values();
    const std::size_t n = s.size();
    r.tail_start = set.tail_start;
    r.low_confidence = n < 2 || s.back() < 10.0 * s.front();

    const auto th = detail::extrapolate_tail(s, prof.theta, set.min_tail_samples);
    const auto bj = detail::extrapolate_tail(s, prof.barj, set.min_tail_samples);
    r.theta_fit = th.fit;
    r.barj_fit = bj.fit;
    r.theta_verdict = th.verdict;
    r.barj_verdict = bj.verdict;
    r.theta_limit_estimate = th.fit.form == "none" ? prof.theta.back() : th.fit.limit;
    r.barj_limit_estimate = bj.fit.form == "none" ? prof.barj.back() : bj.fit.limit;
    if (th.verdict == Finiteness::infinite) r.theta_limit_estimate = std::numeric_limits<double>::infinity();
    if (bj.verdict == Finiteness::infinite) r.barj_limit_estimate = std::numeric_limits<double>::infinity();
    r.limits_ordered = r.barj_limit_estimate >= r.theta_limit_estimate * (1.0 - set.limit_tolerance);

    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = prof.empty_level[i] ? 0.0 : cn_over_sn(s[i], p.k) * prof.tilt_t[i];
    r.tilt_criterion_partials.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        r.tilt_criterion_partials[i] = r.tilt_criterion_partials[i - 1] + 0.5 * (s[i] - s[i - 1]) * (h[i] + h[i - 1]);
    r.tilt_criterion_integral = r.tilt_criterion_partials.back();
    std::size_t it = 0;
    while (it + 1 < n && s[it] < set.tail_start) ++it;
    r.tilt_criterion_tail_increment = r.tilt_criterion_partials.back() - r.tilt_criterion_partials[it];
    r.tail_settled = std::abs(r.tilt_criterion_tail_increment) < set.tail_tolerance;

    // integrand tail: h ~ s^-p is integrable iff p > 1
    {
        std::vector<double> ls, lh;
        double hmax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] >= 0.1 * s.back()) {
                hmax = std::max(hmax, std::abs(h[i]));
                if (h[i] > 0.0) {
                    ls.push_back(std::log(s[i]));
                    lh.push_back(std::log(h[i]));
                }
            }
        if (hmax <= 1e-12) {
            r.tilt_criterion_verdict = Finiteness::finite;
            r.tilt_criterion_decay_exponent = std::numeric_limits<double>::infinity();
        } else if (ls.size() >= set.min_tail_samples) {
            const auto fit = detail::fit_line(ls, lh);
            r.tilt_criterion_decay_exponent = -fit.slope;
            if (-fit.slope > 1.1) r.tilt_criterion_verdict = Finiteness::finite;
            else if (-fit.slope < 0.9) r.tilt_criterion_verdict = Finiteness::infinite;
        }
    }

    using F = Finiteness;
    auto conclusive = [](F f) { return f != F::inconclusive; };
    bool ok = true;
    if (conclusive(r.theta_verdict) && conclusive(r.barj_verdict)) ok = ok && (r.theta_verdict == r.barj_verdict);
    if (r.theta_verdict == F::finite && r.barj_verdict == F::finite && conclusive(r.tilt_criterion_verdict))
        ok = ok && r.tilt_criterion_verdict == F::finite;
    if (comparison && comparison_pinching
        && (*comparison_pinching == Pinching::integral || *comparison_pinching == Pinching::both)
        && r.tilt_criterion_verdict == F::finite && conclusive(r.barj_verdict)) {
        r.converse_checked = true;
        ok = ok && r.barj_verdict == F::finite;
    }
    r.consistent = ok;
    return r;
}

} // namespace densitylab
