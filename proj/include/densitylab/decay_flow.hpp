#pragma once

// Scalar flow-line bound for 1 - |grad r|^2 under prescribed |II| decay, and the
// integrability test of (sn'/sn) w that decides finite density.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "densitylab/comparison_ode.hpp"
#include "densitylab/errors.hpp"
#include "densitylab/grid.hpp"
#include "densitylab/model_geometry.hpp"
#include "densitylab/monotonicity.hpp"
#include "densitylab/quadrature.hpp"

namespace densitylab {

enum class Regime { euclidean, hyperbolic };
enum class DecayForm { log_power, constant };

[[nodiscard]] inline std::string_view to_string(Regime r) { return r == Regime::euclidean ? "euclidean" : "hyperbolic"; }

[[nodiscard]] inline Regime parse_regime(std::string_view s)
{
    if (s == "euclidean") return Regime::euclidean;
    if (s == "hyperbolic") return Regime::hyperbolic;
    throw ConfigError("unknown regime '" + std::string(s) + "' (expected euclidean or hyperbolic)");
}

/// |II|^2 <= c/(s^2 log^alpha s) (euclidean) or c/(s log^alpha s) (hyperbolic), or |II| = const.
struct IIDecayProfile {
    Regime regime = Regime::euclidean;
    double c = 1.0;
    double alpha = 2.0;
    double R = 10.0;
    double k = 0.0;
    DecayForm form = DecayForm::log_power;
    double constant_norm = 0.0; ///< |II| for the constant form

    [[nodiscard]] static IIDecayProfile euclidean(double c, double alpha, double R)
    {
        IIDecayProfile p{Regime::euclidean, c, alpha, R, 0.0};
        p.validate();
        return p;
    }
    [[nodiscard]] static IIDecayProfile hyperbolic(double k, double c, double alpha, double R)
    {
        IIDecayProfile p{Regime::hyperbolic, c, alpha, R, k};
        p.validate();
        return p;
    }
    [[nodiscard]] static IIDecayProfile constant(double k, double norm, double R)
    {
        IIDecayProfile p{k == 0.0 ? Regime::euclidean : Regime::hyperbolic, 0.0, 0.0, R, k, DecayForm::constant, norm};
        p.validate();
        return p;
    }

    void validate() const
    {
        if (!(R > 1.0)) throw ConfigError("decay profile: R must be > 1");
        if (!(k >= 0.0)) throw ConfigError("decay profile: k must be >= 0");
        if (regime == Regime::euclidean && k != 0.0) throw ConfigError("euclidean regime requires k = 0");
        if (regime == Regime::hyperbolic && !(k > 0.0)) throw ConfigError("hyperbolic regime requires k > 0");
        if (form == DecayForm::constant) {
            if (!(constant_norm >= 0.0)) throw ConfigError("decay profile: |II| must be >= 0");
            return;
        }
        if (!(c >= 0.0)) throw ConfigError("decay profile: c must be >= 0");
        if (!(alpha > 0.0)) throw ConfigError("decay profile: alpha must be > 0");
    }

    /// Bound on |II| at radius s > 1.
    [[nodiscard]] double ii_norm(double s) const
    {
        if (form == DecayForm::constant) return constant_norm;
        const double la = std::pow(std::log(s), alpha);
        return regime == Regime::euclidean ? std::sqrt(c / (s * s * la)) : std::sqrt(c / (s * la));
    }

    /// Weight 1/log^alpha s (k = 0) or 1/(s log^alpha s) (k > 0) of the expected envelope.
    [[nodiscard]] double decay_weight(double s) const
    {
        const double la = std::pow(std::log(s), alpha);
        return regime == Regime::euclidean ? 1.0 / la : 1.0 / (s * la);
    }
};

struct GateVerdict {
    bool pass = false;
    double limsup = 0.0;
    double threshold = 0.0; ///< 1 for k = 0 (on s |II|), sqrt k for k > 0 (on |II|)
};

/// limsup s|II| < 1 (k = 0) or limsup |II| < sqrt k (k > 0), from the analytic form.
[[nodiscard]] inline GateVerdict properness_gate(const IIDecayProfile& prof)
{
    prof.validate();
    GateVerdict g;
    const bool flat = prof.regime == Regime::euclidean;
    g.threshold = flat ? 1.0 : std::sqrt(prof.k);
    if (prof.form == DecayForm::constant) {
        g.limsup = flat ? (prof.constant_norm > 0.0 ? std::numeric_limits<double>::infinity() : 0.0) : prof.constant_norm;
    } else {
        // s|II| = sqrt(c)/log^{alpha/2} s and |II| = sqrt(c/(s log^alpha s)) both tend to 0 for alpha > 0
        g.limsup = 0.0;
    }
    g.pass = g.limsup < g.threshold;
    return g;
}

struct FlowSettings {
    std::size_t samples_per_decade = 64;
    double rel_tol = 1e-12;
    double finite_exponent = 1.4;    ///< local log-decay exponent at or above which the tail is integrable
    double divergent_exponent = 1.2; ///< at or below which it is not
};

struct DecadeConstant {
    double lo = 0.0, hi = 0.0;
    double c_hat = 0.0; ///< max of w/decay_weight over the decade
    std::size_t samples = 0;
};

struct FlowBound {
    IIDecayProfile profile;
    Grid grid;
    std::vector<double> w;              ///< upper bound of 1 - |grad r|^2
    std::vector<double> decay_weight;
    std::vector<double> envelope;       ///< w / decay_weight
    std::vector<double> criterion_partials;
    std::vector<DecadeConstant> decades;
    double c_hat = 0.0;                 ///< sup of the envelope beyond 2R
    double c_hat_variation = 0.0;       ///< relative change between the last two decade constants
    Finiteness verdict = Finiteness::inconclusive;
    FlowSettings settings;
};

namespace detail {

inline double sn_ratio(double a, double b, double k)
{
    if (k == 0.0) return a / b;
    const double rk = std::sqrt(k);
    return sinh_ratio(rk * a, rk * b);
}

} // namespace detail

/// w(s) = min(1, (sn(R)/sn(s) + int_R^s (sn(sigma)/sn(s)) |II|(sigma) dsigma)^2).
[[nodiscard]] inline FlowBound integrate_flow_bound(const IIDecayProfile& prof, double s_max, const FlowSettings& set = {})
{
    prof.validate();
    if (!(s_max > 2.0 * prof.R)) throw ConfigError("s_max must exceed 2R");
    FlowBound b;
    b.profile = prof;
    b.settings = set;
    const double decades = std::log10(s_max / prof.R);
    const auto n = static_cast<std::size_t>(std::ceil(decades * set.samples_per_decade)) + 1;
    b.grid = Grid::logspace(prof.R, s_max, std::max<std::size_t>(n, 3));
    const auto& s = b.grid.values();
    const double k = prof.k;

    double y = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) {
            const double si = s[i];
            auto f = [&](double sig) { return detail::sn_ratio(sig, si, k) * prof.ii_norm(sig); };
            y = y * detail::sn_ratio(s[i - 1], si, k) + integrate_gk(f, s[i - 1], si, set.rel_tol).value;
        }
        const double root = detail::sn_ratio(prof.R, s[i], k) + y;
        const double wi = std::clamp(root * root, 0.0, 1.0);
        b.w.push_back(wi);
        const double dw = prof.decay_weight(s[i]);
        b.decay_weight.push_back(dw);
        b.envelope.push_back(wi / dw);
    }

    // decade-by-decade envelope constants beyond 2R
    const double from = 2.0 * prof.R;
    int j = static_cast<int>(std::floor(std::log10(from)));
    while (std::pow(10.0, j) < s_max) {
        DecadeConstant dc;
        dc.lo = std::max(std::pow(10.0, j), from);
        dc.hi = std::min(std::pow(10.0, j + 1), s_max);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] > from && s[i] >= dc.lo && s[i] <= dc.hi) {
                dc.c_hat = std::max(dc.c_hat, b.envelope[i]);
                ++dc.samples;
            }
        if (dc.samples >= 2) b.decades.push_back(dc);
        ++j;
    }
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] > from) b.c_hat = std::max(b.c_hat, b.envelope[i]);
    if (b.decades.size() >= 2) {
        const double a = b.decades[b.decades.size() - 2].c_hat, c = b.decades.back().c_hat;
        b.c_hat_variation = std::abs(c - a) / std::max({a, c, std::numeric_limits<double>::min()});
    }
    return b;
}

struct CriterionReport {
    Finiteness verdict = Finiteness::inconclusive;
    double integral = 0.0;                 ///< int_R^{s_max} (sn'/sn) w
    double last_decade_increment = 0.0;
    double relative_increment = 0.0;       ///< last-decade increment / integral
    double decay_exponent = 0.0;           ///< p in s (sn'/sn) w ~ log^-p s over the last decade
    bool analytic_finite = false;          ///< int (sn'/sn) decay_weight < inf
    bool agrees_with_analytic = false;
    bool low_confidence = false;           ///< s_max < 1e3 R
};

/// Accumulates int (sn'/sn) w and classifies its tail by the local decay exponent in log s.
inline CriterionReport finite_density_criterion(FlowBound& b, const SpaceFormParams& p)
{
    if (p.k != b.profile.k) throw ConfigError("space form curvature does not match the decay profile");
    CriterionReport rep;
    const auto& s = b.grid.values();
    const std::size_t n = s.size();
    rep.low_confidence = s.back() < 1e3 * b.profile.R;

    // phi = s (sn'/sn) w; int h ds = int phi d(log s)
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = s[i] * cn_over_sn(s[i], p.k) * b.w[i];
    b.criterion_partials.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        b.criterion_partials[i] = b.criterion_partials[i - 1] + 0.5 * std::log(s[i] / s[i - 1]) * (phi[i] + phi[i - 1]);
    rep.integral = b.criterion_partials.back();

    std::size_t i0 = 0;
    while (i0 + 1 < n && s[i0] < 0.1 * s.back()) ++i0;
    rep.last_decade_increment = rep.integral - b.criterion_partials[i0];
    rep.relative_increment = rep.integral > 0.0 ? rep.last_decade_increment / rep.integral : 0.0;

    std::vector<double> x, y;
    double pmax = 0.0;
    for (std::size_t i = i0; i < n; ++i) {
        pmax = std::max(pmax, phi[i]);
        if (phi[i] > 0.0) {
            x.push_back(std::log(std::log(s[i])));
            y.push_back(std::log(phi[i]));
        }
    }
    if (pmax <= 1e-300) {
        rep.verdict = Finiteness::finite;
        rep.decay_exponent = std::numeric_limits<double>::infinity();
    } else if (x.size() >= 3) {
        rep.decay_exponent = -detail::fit_line(x, y).slope;
        if (rep.decay_exponent >= b.settings.finite_exponent) rep.verdict = Finiteness::finite;
        else if (rep.decay_exponent <= b.settings.divergent_exponent) rep.verdict = Finiteness::infinite;
    }

    rep.analytic_finite = b.profile.form == DecayForm::log_power && (b.profile.alpha > 1.0 || b.profile.c == 0.0);
    rep.agrees_with_analytic = rep.verdict != Finiteness::inconclusive
        && ((rep.verdict == Finiteness::finite) == rep.analytic_finite);
    b.verdict = rep.verdict;
    return rep;
}

} // namespace densitylab
