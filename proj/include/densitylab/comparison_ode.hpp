#pragma once

// Radial comparison ODE g'' = G g, g(0) = 0, g'(0) = 1, and the defect zeta = g'/g - sn'/sn.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "densitylab/errors.hpp"
#include "densitylab/grid.hpp"
#include "densitylab/model_geometry.hpp"

namespace densitylab {

class CurvatureProfile {
public:
    enum class Form { constant, power_tail, exp_tail, tabulated };

    /// G = k + c.
    [[nodiscard]] static CurvatureProfile constant(double k, double c = 0.0)
    {
        CurvatureProfile p;
        p.k_ = k;
        p.c_ = c;
        p.form_ = Form::constant;
        p.validate();
        return p;
    }

    /// G = k + c (1+s)^{-p}.
    [[nodiscard]] static CurvatureProfile power_tail(double k, double c, double p_exp)
    {
        CurvatureProfile p;
        p.k_ = k;
        p.c_ = c;
        p.p_ = p_exp;
        p.form_ = Form::power_tail;
        p.validate();
        return p;
    }

    /// G = k + c e^{-a s}.
    [[nodiscard]] static CurvatureProfile exp_tail(double k, double c, double a)
    {
        CurvatureProfile p;
        p.k_ = k;
        p.c_ = c;
        p.a_ = a;
        p.form_ = Form::exp_tail;
        p.validate();
        return p;
    }

    /// Piecewise-linear G through (s_i, G_i); held constant outside the table.
    [[nodiscard]] static CurvatureProfile tabulated(double k, std::vector<double> s, std::vector<double> g)
    {
        CurvatureProfile p;
        p.k_ = k;
        p.form_ = Form::tabulated;
        p.ts_ = std::move(s);
        p.tg_ = std::move(g);
        p.validate();
        return p;
    }

    /// Two whitespace-separated columns (s, G) per line; '#' starts a comment.
    [[nodiscard]] static CurvatureProfile load_tabulated(const std::string& path, double k)
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open curvature table '" + path + "'");
        std::vector<double> s, g;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            double a, b;
            if (!(ls >> a)) continue;
            std::string rest;
            if (!(ls >> b) || (ls >> rest))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
            s.push_back(a);
            g.push_back(b);
        }
        return tabulated(k, std::move(s), std::move(g));
    }

    void validate() const
    {
        if (!(k_ >= 0.0) || !std::isfinite(k_)) throw ConfigError("curvature profile: k must be >= 0");
        switch (form_) {
        case Form::constant:
            if (!(c_ >= 0.0)) throw ConfigError("curvature profile: c must be >= 0");
            break;
        case Form::power_tail:
            if (!(c_ >= 0.0)) throw ConfigError("curvature profile: c must be >= 0");
            if (!(p_ > 0.0)) throw ConfigError("curvature profile: p must be > 0");
            break;
        case Form::exp_tail:
            if (!(c_ >= 0.0)) throw ConfigError("curvature profile: c must be >= 0");
            if (!(a_ > 0.0)) throw ConfigError("curvature profile: a must be > 0");
            break;
        case Form::tabulated:
            if (ts_.size() < 2 || ts_.size() != tg_.size())
                throw ConfigError("curvature table needs at least two (s, G) rows");
            for (std::size_t i = 0; i < ts_.size(); ++i) {
                if (!std::isfinite(ts_[i]) || !std::isfinite(tg_[i]) || ts_[i] < 0.0)
                    throw ConfigError("curvature table: non-finite or negative entry");
                if (i > 0 && !(ts_[i] > ts_[i - 1])) throw ConfigError("curvature table: s must increase");
                if (tg_[i] < k_ - 1e-12 * std::max(1.0, k_))
                    throw ConfigError("curvature table: G < k at s = " + std::to_string(ts_[i]));
            }
            break;
        }
    }

    [[nodiscard]] double G(double s) const
    {
        switch (form_) {
        case Form::constant: return k_ + c_;
        case Form::power_tail: return k_ + c_ * std::pow(1.0 + s, -p_);
        case Form::exp_tail: return k_ + c_ * std::exp(-a_ * s);
        case Form::tabulated: {
            if (s <= ts_.front()) return tg_.front();
            if (s >= ts_.back()) return tg_.back();
            const auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
            const std::size_t j = static_cast<std::size_t>(it - ts_.begin());
            const double w = (s - ts_[j - 1]) / (ts_[j] - ts_[j - 1]);
            return (1.0 - w) * tg_[j - 1] + w * tg_[j];
        }
        }
        return k_;
    }

    [[nodiscard]] double k() const noexcept { return k_; }
    [[nodiscard]] Form form() const noexcept { return form_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] const std::vector<double>& table_s() const noexcept { return ts_; }
    [[nodiscard]] const std::vector<double>& table_g() const noexcept { return tg_; }

private:
    CurvatureProfile() = default;
    double k_ = 0.0;
    Form form_ = Form::constant;
    double c_ = 0.0, p_ = 0.0, a_ = 0.0;
    std::vector<double> ts_, tg_;
};

[[nodiscard]] inline std::string_view to_string(CurvatureProfile::Form f)
{
    switch (f) {
    case CurvatureProfile::Form::constant: return "constant";
    case CurvatureProfile::Form::power_tail: return "power_tail";
    case CurvatureProfile::Form::exp_tail: return "exp_tail";
    case CurvatureProfile::Form::tabulated: return "tabulated";
    }
    return "?";
}

struct OdeSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double launch = 1e-3; ///< series start s0
};

struct ComparisonSolution {
    Grid grid;
    std::vector<double> g, g_prime, g_second;
    std::vector<double> zeta, zeta_prime;
    std::vector<double> zeta_integral; ///< int_0^{s_i} zeta, integrated alongside (g, g')
    double k = 0.0;
    double launch = 0.0;
    OdeSettings settings;

    /// Index i with s_i <= s <= s_{i+1}; throws outside the grid.
    [[nodiscard]] std::size_t bracket(double s) const
    {
        const auto& v = grid.values();
        const double slack = 1e-12 * std::max(1.0, std::abs(v.back()));
        if (s < v.front() - slack || s > v.back() + slack)
            throw DomainError("comparison solution queried outside its grid");
        if (v.size() == 1) return 0;
        auto it = std::upper_bound(v.begin(), v.end(), s);
        std::size_t j = static_cast<std::size_t>(it - v.begin());
        if (j == 0) j = 1;
        if (j >= v.size()) j = v.size() - 1;
        return j - 1;
    }

    [[nodiscard]] double g_at(double s) const { return hermite(s, g, g_prime); }
    [[nodiscard]] double g_prime_at(double s) const { return hermite(s, g_prime, g_second); }
    [[nodiscard]] double zeta_at(double s) const { return hermite(s, zeta, zeta_prime); }

private:
    [[nodiscard]] double hermite(double s, const std::vector<double>& y, const std::vector<double>& dy) const
    {
        const std::size_t i = bracket(s);
        if (grid.size() == 1) return y[0];
        const double a = grid[i], b = grid[i + 1], h = b - a;
        const double t = std::clamp((s - a) / h, 0.0, 1.0);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * dy[i] + (-2 * t3 + 3 * t2) * y[i + 1]
            + (t3 - t2) * h * dy[i + 1];
    }
};

/// Integrates g'' = G g from a two-term series start and samples it on the grid.
[[nodiscard]] inline ComparisonSolution solve_g(const CurvatureProfile& prof, const Grid& grid,
                                                const OdeSettings& set = {})
{
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 3>; // g, g', int zeta
    prof.validate();
    if (grid.empty()) throw DomainError("solve_g: empty grid");
    const double k = prof.k();

    ComparisonSolution sol;
    sol.grid = grid;
    sol.k = k;
    sol.settings = set;
    const double s0 = std::min(set.launch, grid.front());
    sol.launch = s0;

    const double G0 = prof.G(0.0);
    State x{s0 + G0 * s0 * s0 * s0 / 6.0, 1.0 + 0.5 * G0 * s0 * s0, (G0 - k) * s0 * s0 / 6.0};

    auto rhs = [&](const State& y, State& dy, double s) {
        dy[0] = y[1];
        dy[1] = prof.G(s) * y[0];
        dy[2] = y[1] / y[0] - cn_over_sn(s, k);
    };

    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(set.abs_tol, set.rel_tol);
    double last_s = s0;
    double cur = s0;
    auto record = [&](double s) {
        const double G = prof.G(s);
        sol.g.push_back(x[0]);
        sol.g_prime.push_back(x[1]);
        sol.g_second.push_back(G * x[0]);
        const double lg = x[1] / x[0];
        const double lm = cn_over_sn(s, k);
        const double z = lg - lm;
        sol.zeta.push_back(z);
        sol.zeta_prime.push_back((G - k) - z * (lg + lm));
        sol.zeta_integral.push_back(x[2]);
    };

    for (double target : grid) {
        if (target > cur) {
            double dt = std::min(1e-4, 0.1 * (target - cur));
            try {
                odeint::integrate_adaptive(stepper, rhs, x, cur, target, dt,
                                           [&](const State& y, double s) {
                                               if (std::isfinite(y[0]) && std::isfinite(y[1]) && y[0] > 0.0)
                                                   last_s = s;
                                           });
            } catch (const std::exception& e) {
                throw IntegrationFailure(std::string("solve_g: stepper failed: ") + e.what(), last_s);
            }
            if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !(x[0] > 0.0))
                throw IntegrationFailure("solve_g: state left the finite positive range", last_s);
            cur = target;
        }
        record(target);
    }
    return sol;
}

enum class Pinching { pointwise, integral, both, neither, inconclusive };

[[nodiscard]] inline std::string_view to_string(Pinching p)
{
    switch (p) {
    case Pinching::pointwise: return "pointwise";
    case Pinching::integral: return "integral";
    case Pinching::both: return "both";
    case Pinching::neither: return "neither";
    case Pinching::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace detail {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy > 0 && sxx > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline Pinching combine(bool pointwise, bool integral)
{
    if (pointwise && integral) return Pinching::both;
    if (pointwise) return Pinching::pointwise;
    if (integral) return Pinching::integral;
    return Pinching::neither;
}

} // namespace detail

/// Minimum number of tail samples and goodness of fit for tabulated verdicts.
inline constexpr std::size_t kPinchingMinTail = 5;
inline constexpr double kPinchingMinR2 = 0.98;

/// Pinching class of G: sG -> 0 / sG in L1 for k = 0, G-k -> 0 / G-k in L1 for k > 0.
[[nodiscard]] inline Pinching classify_pinching(const CurvatureProfile& prof)
{
    prof.validate();
    const bool flat = prof.k() == 0.0;
    using F = CurvatureProfile::Form;
    switch (prof.form()) {
    case F::constant:
        return prof.c() == 0.0 ? Pinching::both : Pinching::neither;
    case F::exp_tail:
        return Pinching::both;
    case F::power_tail:
        if (prof.c() == 0.0) return Pinching::both;
        if (flat) return detail::combine(prof.p() > 1.0, prof.p() > 2.0);
        return detail::combine(true, prof.p() > 1.0);
    case F::tabulated: break;
    }

    // Tabulated: fit the last decade of q(s) = s G (k = 0) or G - k (k > 0).
    const auto& s = prof.table_s();
    const auto& g = prof.table_g();
    const double sN = s.back();
    std::vector<double> xs, lq, ss;
    bool all_zero = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0.1 * sN || s[i] <= 0.0) continue;
        const double q = flat ? s[i] * g[i] : g[i] - prof.k();
        if (q > 1e-300) all_zero = false;
        xs.push_back(std::log(s[i]));
        ss.push_back(s[i]);
        lq.push_back(std::log(std::max(q, 1e-300)));
    }
    if (xs.size() < kPinchingMinTail || sN < 10.0 * s[std::min<std::size_t>(1, s.size() - 1)])
        return Pinching::inconclusive;
    if (all_zero) return Pinching::both;
    const auto pw = detail::fit_line(xs, lq);
    const auto ex = detail::fit_line(ss, lq);
    if (std::max(pw.r2, ex.r2) < kPinchingMinR2) return Pinching::inconclusive;
    if (ex.r2 > pw.r2) {
        if (ex.slope < -1e-8) return Pinching::both;
        if (ex.slope > 1e-8) return Pinching::neither;
        return Pinching::inconclusive;
    }
    const double decay = -pw.slope; // q ~ s^{-decay}
    if (std::abs(decay) < 0.05 || std::abs(decay - 1.0) < 0.05) return Pinching::inconclusive;
    return detail::combine(decay > 0.0, decay > 1.0);
}

struct PinchingTolerances {
    double negativity = 1e-9;     ///< allowed zeta < 0
    double tail_increment = 1e-6; ///< int zeta beyond tail_start
    double scaled_tail = 1e-4;    ///< zeta sn/sn' at the last sample
    double ratio_stability = 1e-4;
    double log_identity = 1e-7;
    double min_reach = 30.0;
    std::optional<double> tail_start; ///< defaults to 0.75 s_N
};

struct PinchingCheck {
    bool pass = true;
    double measured = 0.0;
    double tolerance = 0.0;
};

struct PinchingReport {
    PinchingCheck zeta_nonnegative;   ///< measured = min zeta
    PinchingCheck zeta_origin;        ///< measured = zeta at the first sample
    PinchingCheck ratio_nondecreasing; ///< measured = min relative step of g/sn
    PinchingCheck log_identity;       ///< measured = max |log(g/sn) - int zeta|
    PinchingCheck integral_tail;      ///< measured = int_{tail_start}^{s_N} zeta
    PinchingCheck scaled_tail;        ///< measured = zeta(s_N) sn/sn'
    PinchingCheck ratio_stability;    ///< measured = relative spread of g/sn on the tail window
    double zeta_tail = 0.0;
    double zeta_integral_total = 0.0;
    double ratio_limit = 1.0;
    double tail_start = 0.0;
    bool under_resolved = false;
    std::optional<Pinching> classification;
    bool classification_consistent = true;

    /// Structural conclusions: sign, origin behaviour, monotone ratio, log identity.
    [[nodiscard]] bool structural_pass() const
    {
        return zeta_nonnegative.pass && zeta_origin.pass && ratio_nondecreasing.pass && log_identity.pass;
    }
    /// Tail conclusions expected under integral pinching.
    [[nodiscard]] bool tail_pass() const { return integral_tail.pass && scaled_tail.pass && ratio_stability.pass; }
};

[[nodiscard]] inline PinchingReport verify_pinching_limits(const ComparisonSolution& sol,
                                                           const PinchingTolerances& tol = {},
                                                           const CurvatureProfile* prof = nullptr)
{
    PinchingReport r;
    const auto& s = sol.grid.values();
    const std::size_t N = s.size();
    const double k = sol.k;
    r.under_resolved = s.back() < tol.min_reach;
    r.tail_start = tol.tail_start.value_or(0.75 * s.back());

    r.zeta_nonnegative.tolerance = tol.negativity;
    r.zeta_nonnegative.measured = *std::min_element(sol.zeta.begin(), sol.zeta.end());
    r.zeta_nonnegative.pass = r.zeta_nonnegative.measured >= -tol.negativity;

    // zeta ~ (G(0)-k) s/3 near the origin.
    const double G0 = sol.g_second.front() / sol.g.front();
    r.zeta_origin.measured = sol.zeta.front();
    r.zeta_origin.tolerance = 1.1 * std::abs(G0 - k) * s.front() / 3.0 + 1e-8;
    r.zeta_origin.pass = std::abs(r.zeta_origin.measured) <= r.zeta_origin.tolerance;

    std::vector<double> ratio(N);
    double max_log = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        // log(g/sn) without overflowing sn
        double lsn;
        if (k == 0.0) {
            lsn = std::log(s[i]);
        } else {
            const double rk = std::sqrt(k), x = rk * s[i];
            lsn = (x < 20.0 ? std::log(std::sinh(x)) : x + std::log1p(-std::exp(-2 * x)) - std::log(2.0)) - std::log(rk);
        }
        const double lr = std::log(sol.g[i]) - lsn;
        ratio[i] = std::exp(lr);
        max_log = std::max(max_log, std::abs(lr - sol.zeta_integral[i]));
    }
    r.log_identity.measured = max_log;
    r.log_identity.tolerance = tol.log_identity;
    r.log_identity.pass = max_log <= tol.log_identity;

    double min_step = 0.0;
    for (std::size_t i = 1; i < N; ++i) min_step = std::min(min_step, (ratio[i] - ratio[i - 1]) / ratio[i]);
    r.ratio_nondecreasing.measured = min_step;
    r.ratio_nondecreasing.tolerance = 10.0 * tol.log_identity;
    r.ratio_nondecreasing.pass = min_step >= -r.ratio_nondecreasing.tolerance;

    r.zeta_tail = sol.zeta.back();
    r.zeta_integral_total = sol.zeta_integral.back();
    r.ratio_limit = ratio.back();

    // first sample at or beyond the tail start
    std::size_t it = 0;
    while (it + 1 < N && s[it] < r.tail_start) ++it;
    r.integral_tail.measured = sol.zeta_integral.back() - sol.zeta_integral[it];
    r.integral_tail.tolerance = tol.tail_increment;
    r.integral_tail.pass = std::abs(r.integral_tail.measured) < tol.tail_increment;

    r.scaled_tail.measured = sol.zeta.back() / cn_over_sn(s.back(), k);
    r.scaled_tail.tolerance = tol.scaled_tail;
    r.scaled_tail.pass = std::abs(r.scaled_tail.measured) < tol.scaled_tail;

    const auto [lo, hi] = std::minmax_element(ratio.begin() + static_cast<std::ptrdiff_t>(it), ratio.end());
    r.ratio_stability.measured = (*hi - *lo) / std::abs(ratio.back());
    r.ratio_stability.tolerance = tol.ratio_stability;
    r.ratio_stability.pass = r.ratio_stability.measured < tol.ratio_stability;

    if (prof) {
        r.classification = classify_pinching(*prof);
        if (*r.classification == Pinching::integral || *r.classification == Pinching::both)
            r.classification_consistent = r.tail_pass();
    }
    return r;
}

} // namespace densitylab
