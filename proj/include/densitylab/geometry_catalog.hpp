#pragma once

// Analytic minimal immersions with pointwise r, |grad r|, Lap r, |II| and area density.
// All entries are rotationally symmetric about the pole, so every chart has one
// profile coordinate u (first chart coordinate) and angular coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "densitylab/errors.hpp"
#include "densitylab/hyperdual.hpp"
#include "densitylab/model_geometry.hpp"

namespace densitylab {

enum class EntryId { totally_geodesic, euclidean_cone_clifford, euclidean_catenoid, hyperbolic_plane_poincare };

[[nodiscard]] inline std::string_view to_string(EntryId id)
{
    switch (id) {
    case EntryId::totally_geodesic: return "totally_geodesic";
    case EntryId::euclidean_cone_clifford: return "euclidean_cone_clifford";
    case EntryId::euclidean_catenoid: return "euclidean_catenoid";
    case EntryId::hyperbolic_plane_poincare: return "hyperbolic_plane_poincare";
    }
    return "?";
}

[[nodiscard]] inline EntryId parse_entry_id(std::string_view s)
{
    for (EntryId id : {EntryId::totally_geodesic, EntryId::euclidean_cone_clifford, EntryId::euclidean_catenoid,
                       EntryId::hyperbolic_plane_poincare})
        if (s == to_string(id)) return id;
    throw ConfigError("unknown entry id '" + std::string(s) + "'");
}

struct PointData {
    std::vector<double> position; ///< ambient coordinates (hyperboloid model for intrinsic k > 0 charts)
    double r = 0.0;
    double gradr_norm = 0.0;
    double lap_r = 0.0;
    double II_norm = 0.0;
    double area_density = 0.0;
    double mean_curvature = 0.0; ///< |H|, zero up to roundoff for minimal entries
};

/// Data along the profile curve needed by the 1-D reduction.
struct RadialSample {
    double u = 0.0;
    double r = 0.0;
    double dr_du = 0.0;
    double g_uu = 1.0;
    double orbit = 0.0; ///< (m-1)-volume of the symmetry orbit through u
    double gradr = 0.0;
    double lap_r = 0.0;
    double ii_norm = 0.0;

    /// Area element in u after integrating out the angles.
    [[nodiscard]] double weight() const { return orbit * std::sqrt(g_uu); }
};

/// Maximal interval of the profile coordinate on which r is strictly monotone.
struct Branch {
    double u_lo = 0.0, u_hi = 0.0;
    double r_lo = 0.0, r_hi = 0.0; ///< range of r over the branch
    bool increasing = true;
};

/// Terms of |IIbar|^2_E = lambda^{-2}|II|^2 + m |(grad_E log lambda)^perp|^2 in the Poincare ball.
struct ConformalTerms {
    double ball_radius = 0.0;
    double euclidean_ii_sq = 0.0;
    double scaled_hyperbolic_ii_sq = 0.0;
    double normal_log_gradient_sq = 0.0; ///< already multiplied by m
    double residual = 0.0;
};

namespace detail {

/// Differential-geometric data of an embedded chart point.
struct EngineOut {
    PointData pd;
    Eigen::MatrixXd metric;
    Eigen::VectorXd dr;
    ConformalTerms conf;
};

template <class T>
T rho_bar(const T* X, int n, bool ball)
{
    using std::atanh;
    using std::sqrt;
    T q = X[0] * X[0];
    for (int a = 1; a < n; ++a) q += X[a] * X[a];
    T rad = sqrt(q);
    if (!ball) return rad;
    return 2.0 * atanh(rad);
}

/// Induced metric, Christoffels, Lap r and II of X(u) in R^n or in the Poincare ball.
template <class Emb>
EngineOut run_engine(const Emb& emb, std::span<const double> u, bool ball)
{
    constexpr int M = Emb::dim;
    constexpr int A = Emb::ambient;
    std::array<HyperDual, M> uu;
    std::array<HyperDual, A> X;
    Eigen::Matrix<double, A, M> Xi;
    std::array<Eigen::Matrix<double, A, 1>, M * M> Xij;
    Eigen::Matrix<double, A, 1> x;
    Eigen::Matrix<double, M, 1> ri;
    Eigen::Matrix<double, M, M> rij;
    double r = 0.0;

    // Seed the point first so the pole test happens before derivatives blow up.
    {
        std::array<double, M> ud;
        std::array<double, A> Xd;
        for (int l = 0; l < M; ++l) ud[l] = u[l];
        emb.map(ud.data(), Xd.data());
        double q = 0.0;
        for (double c : Xd) q += c * c;
        if (q < 1e-300) throw PoleSingularityError("pole lies on the submanifold: r = 0 and Lap r is unbounded");
        if (ball && q >= 1.0) throw DomainError("point outside the open Poincare ball");
    }

    for (int i = 0; i < M; ++i) {
        for (int j = i; j < M; ++j) {
            for (int l = 0; l < M; ++l) uu[l] = HyperDual(u[l], l == i ? 1.0 : 0.0, l == j ? 1.0 : 0.0, 0.0);
            emb.map(uu.data(), X.data());
            const HyperDual rr = rho_bar(X.data(), A, ball);
            for (int a = 0; a < A; ++a) {
                x(a) = X[a].v;
                Xi(a, i) = X[a].d1;
                Xi(a, j) = X[a].d2;
                Xij[i * M + j](a) = X[a].d12;
            }
            Xij[j * M + i] = Xij[i * M + j];
            r = rr.v;
            ri(i) = rr.d1;
            ri(j) = rr.d2;
            rij(i, j) = rij(j, i) = rr.d12;
        }
    }

    const double x2 = x.squaredNorm();
    double ef = 1.0; // conformal factor e^phi
    Eigen::Matrix<double, A, 1> gphi = Eigen::Matrix<double, A, 1>::Zero();
    if (ball) {
        ef = 2.0 / (1.0 - x2);
        gphi = (2.0 / (1.0 - x2)) * x;
    }
    const Eigen::Matrix<double, M, M> E = Xi.transpose() * Xi;
    const Eigen::Matrix<double, M, M> Einv = E.inverse();
    const Eigen::Matrix<double, M, 1> phii = Xi.transpose() * gphi;
    const double ef2 = ef * ef;
    const Eigen::Matrix<double, M, M> g = ef2 * E;
    const Eigen::Matrix<double, M, M> ginv = Einv / ef2;

    // dg[c](i,j) = d_c g_ij
    std::array<Eigen::Matrix<double, M, M>, M> dg;
    for (int c = 0; c < M; ++c)
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                dg[c](i, j) = ef2
                    * (2.0 * phii(c) * E(i, j) + Xij[i * M + c].dot(Xi.col(j)) + Xi.col(i).dot(Xij[j * M + c]));

    double lap = 0.0;
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            double hess = rij(i, j);
            for (int l = 0; l < M; ++l) {
                double gam = 0.0;
                for (int s = 0; s < M; ++s) gam += ginv(l, s) * (dg[i](j, s) + dg[j](i, s) - dg[s](i, j));
                hess -= 0.5 * gam * ri(l);
            }
            lap += ginv(i, j) * hess;
        }
    }
    const double grad2 = ri.dot(ginv * ri);

    const Eigen::Matrix<double, A, A> P
        = Eigen::Matrix<double, A, A>::Identity() - Xi * Einv * Xi.transpose();
    std::array<Eigen::Matrix<double, A, 1>, M * M> N, Ne;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            Ne[i * M + j] = P * Xij[i * M + j];
            N[i * M + j] = Ne[i * M + j] - E(i, j) * (P * gphi);
        }
    double hyp = 0.0, euc = 0.0;
    Eigen::Matrix<double, A, 1> H = Eigen::Matrix<double, A, 1>::Zero();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            H += Einv(i, j) * N[i * M + j];
            for (int k = 0; k < M; ++k)
                for (int l = 0; l < M; ++l) {
                    const double w = Einv(i, k) * Einv(j, l);
                    hyp += w * N[i * M + j].dot(N[k * M + l]);
                    euc += w * Ne[i * M + j].dot(Ne[k * M + l]);
                }
        }

    EngineOut out;
    out.pd.position.assign(x.data(), x.data() + A);
    out.pd.r = r;
    out.pd.gradr_norm = std::sqrt(std::max(0.0, grad2));
    out.pd.lap_r = lap;
    out.pd.II_norm = std::sqrt(std::max(0.0, hyp)) / ef;
    out.pd.area_density = std::pow(ef, M) * std::sqrt(E.determinant());
    out.pd.mean_curvature = H.norm() / ef;
    out.metric = g;
    out.dr = ri;
    if (ball) {
        out.conf.ball_radius = std::sqrt(x2);
        out.conf.euclidean_ii_sq = euc;
        out.conf.scaled_hyperbolic_ii_sq = hyp; // lambda^{-2} |II|^2 with lambda = 1/ef
        out.conf.normal_log_gradient_sq = M * (P * gphi).squaredNorm();
        out.conf.residual = euc - hyp - out.conf.normal_log_gradient_sq;
    }
    return out;
}

class Chart {
public:
    virtual ~Chart() = default;
    [[nodiscard]] virtual PointData evaluate(std::span<const double> u) const = 0;
    [[nodiscard]] virtual RadialSample radial(double u) const = 0;
    [[nodiscard]] virtual double r_of(double u) const = 0;
    /// dr/du along the profile; NaN where r is not differentiable (pole).
    [[nodiscard]] virtual double dr_du(double u) const = 0;
    [[nodiscard]] virtual ConformalTerms conformal(std::span<const double>) const
    {
        throw CapabilityError("conformal identity needs a Poincare-ball entry");
    }
    [[nodiscard]] virtual std::vector<double> scan_points() const = 0;

    int m = 2;
    double u_lo = 0.0, u_hi = 1.0;
    std::vector<std::pair<double, double>> angle_ranges;
    std::vector<double> angle_ref;
    bool ball = false;

    void check_domain(std::span<const double> u) const
    {
        if (u.size() != static_cast<std::size_t>(m)) throw DomainError("chart point has wrong dimension");
        if (!(u[0] >= u_lo && u[0] <= u_hi)) throw DomainError("chart point outside the profile range");
        for (std::size_t a = 0; a < angle_ranges.size(); ++a)
            if (!(u[a + 1] >= angle_ranges[a].first && u[a + 1] <= angle_ranges[a].second))
                throw DomainError("chart point outside the angular range");
    }
};

/// Charts given by an explicit embedding map.
template <class Emb>
class EmbeddedChart : public Chart {
public:
    EmbeddedChart(Emb e, double lo, double hi, std::vector<std::pair<double, double>> angles,
                  std::vector<double> ref, double angular_measure, bool in_ball, bool polar_origin)
        : emb_(std::move(e)), measure_(angular_measure), polar_(polar_origin)
    {
        m = Emb::dim;
        u_lo = lo;
        u_hi = hi;
        angle_ranges = std::move(angles);
        angle_ref = std::move(ref);
        ball = in_ball;
    }

    PointData evaluate(std::span<const double> u) const override
    {
        check_domain(u);
        if (polar_ && u[0] == u_lo) {
            if (r_of(u[0]) == 0.0) throw PoleSingularityError("pole lies on the submanifold: Lap r is unbounded at r = 0");
            throw DomainError("polar chart is degenerate at the profile origin");
        }
        return run_engine(emb_, u, ball).pd;
    }

    RadialSample radial(double u) const override
    {
        const auto pt = point(u);
        const auto out = run_engine(emb_, std::span<const double>(pt), ball);
        RadialSample s;
        s.u = u;
        s.r = out.pd.r;
        s.dr_du = out.dr(0);
        s.g_uu = out.metric(0, 0);
        s.orbit = std::sqrt(out.metric.bottomRightCorner(m - 1, m - 1).determinant()) * measure_;
        s.gradr = std::min(1.0, out.pd.gradr_norm);
        s.lap_r = out.pd.lap_r;
        s.ii_norm = out.pd.II_norm;
        return s;
    }

    double r_of(double u) const override
    {
        auto pt = point(u);
        std::array<double, Emb::ambient> X;
        emb_.map(pt.data(), X.data());
        return rho_bar(X.data(), Emb::ambient, ball);
    }

    double dr_du(double u) const override
    {
        std::array<HyperDual, Emb::dim> uu;
        auto pt = point(u);
        for (int l = 0; l < Emb::dim; ++l) uu[l] = HyperDual(pt[l], l == 0 ? 1.0 : 0.0, 0.0, 0.0);
        std::array<HyperDual, Emb::ambient> X;
        emb_.map(uu.data(), X.data());
        double q = 0.0;
        for (const auto& c : X) q += c.v * c.v;
        if (q < 1e-300) return std::numeric_limits<double>::quiet_NaN();
        return rho_bar(X.data(), Emb::ambient, ball).d1;
    }

    ConformalTerms conformal(std::span<const double> u) const override
    {
        if (!ball) return Chart::conformal(u);
        check_domain(u);
        return run_engine(emb_, u, ball).conf;
    }

    std::vector<double> scan_points() const override
    {
        return emb_.scan_points(u_lo, u_hi);
    }

private:
    std::vector<double> point(double u) const
    {
        std::vector<double> pt(static_cast<std::size_t>(m));
        pt[0] = u;
        for (std::size_t a = 0; a < angle_ref.size(); ++a) pt[a + 1] = angle_ref[a];
        return pt;
    }

    Emb emb_;
    double measure_;
    bool polar_;
};

// (cosh v cos phi, cosh v sin phi, v)
struct CatenoidMap {
    static constexpr int dim = 2;
    static constexpr int ambient = 3;
    template <class T>
    void map(const T* u, T* X) const
    {
        using std::cos;
        using std::cosh;
        using std::sin;
        const T c = cosh(u[0]);
        X[0] = c * cos(u[1]);
        X[1] = c * sin(u[1]);
        X[2] = u[0];
    }
    static std::vector<double> scan_points(double lo, double hi)
    {
        constexpr int n = 2001; // odd, so the symmetric scan hits v = 0
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1.0);
        v[n / 2] = 0.0;
        return v;
    }
};

// s (cos t1, sin t1, cos t2, sin t2)/sqrt(2): cone over the Clifford torus
struct CliffordConeMap {
    static constexpr int dim = 3;
    static constexpr int ambient = 4;
    template <class T>
    void map(const T* u, T* X) const
    {
        using std::cos;
        using std::sin;
        const T a = u[0] * (1.0 / std::numbers::sqrt2);
        X[0] = a * cos(u[1]);
        X[1] = a * sin(u[1]);
        X[2] = a * cos(u[2]);
        X[3] = a * sin(u[2]);
    }
    static std::vector<double> scan_points(double lo, double hi)
    {
        std::vector<double> v{lo};
        for (double s = 1e-6; s < hi; s *= 1.5) v.push_back(s);
        v.push_back(hi);
        return v;
    }
};

// Totally geodesic H^2 in the Poincare ball: the equatorial disc moved by the
// ball isometry that sends 0 to delta e3, delta = tanh(d/2).
struct PoincarePlaneMap {
    static constexpr int dim = 2;
    static constexpr int ambient = 3;
    double delta = 0.0;
    template <class T>
    void map(const T* u, T* X) const
    {
        using std::cos;
        using std::sin;
        using std::tanh;
        const T t = tanh(0.5 * u[0]);
        const T y1 = t * cos(u[1]);
        const T y2 = t * sin(u[1]);
        const T q = y1 * y1 + y2 * y2;
        const double d2 = delta * delta;
        const T den = 1.0 + d2 * q;
        X[0] = (1.0 - d2) * y1 / den;
        X[1] = (1.0 - d2) * y2 / den;
        X[2] = delta * (1.0 + q) / den;
    }
    static std::vector<double> scan_points(double lo, double hi)
    {
        constexpr int n = 801;
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1.0);
        return v;
    }
};

/// Totally geodesic N^m_k through (or at distance d from) the pole, in intrinsic polar coordinates.
class TotallyGeodesicChart : public Chart {
public:
    TotallyGeodesicChart(const SpaceFormParams& p, double d) : p_(p), d_(d), rk_(std::sqrt(p.k))
    {
        m = p.m;
        u_lo = 0.0;
        u_hi = p.k == 0.0 ? 1e12 : 650.0 / ((p.m - 1) * rk_);
        for (int j = 1; j < m - 1; ++j) angle_ranges.emplace_back(0.0, std::numbers::pi);
        angle_ranges.emplace_back(0.0, 2.0 * std::numbers::pi);
        angle_ref.assign(static_cast<std::size_t>(m - 1), 0.5);
    }

    double r_of(double rho) const override
    {
        if (p_.k == 0.0) return std::hypot(rho, d_);
        if (d_ == 0.0) return rho;
        const double a = rk_ * rho, b = rk_ * d_;
        if (a + b < 30.0) {
            const double sa = std::sinh(0.5 * a), sb = std::sinh(0.5 * b);
            const double t = 2.0 * sa * sa * std::cosh(b) + 2.0 * sb * sb; // cosh a cosh b - 1
            return std::log1p(t + std::sqrt(t * (t + 2.0))) / rk_;
        }
        auto logcosh = [](double z) { return z + std::log1p(std::exp(-2.0 * z)) - std::numbers::ln2; };
        const double ly = logcosh(a) + logcosh(b);
        // acosh(y) = log y + log(1 + sqrt(1 - y^-2))
        return (ly + std::log1p(std::sqrt(-std::expm1(-2.0 * ly)))) / rk_;
    }

    double dr_du(double rho) const override
    {
        if (p_.k == 0.0) {
            const double r = r_of(rho);
            return r > 0.0 ? rho / r : 1.0;
        }
        if (d_ == 0.0) return 1.0;
        return std::tanh(rk_ * rho) / std::tanh(rk_ * r_of(rho));
    }

    RadialSample radial(double rho) const override
    {
        RadialSample s;
        s.u = rho;
        s.r = r_of(rho);
        s.dr_du = dr_du(rho);
        s.g_uu = 1.0;
        s.orbit = rho > 0.0 ? sphere_volume(rho, p_) : 0.0;
        s.gradr = std::min(1.0, std::abs(s.dr_du));
        s.lap_r = laplacian(rho, s.r);
        s.ii_norm = 0.0;
        return s;
    }

    PointData evaluate(std::span<const double> u) const override
    {
        check_domain(u);
        const double rho = u[0];
        PointData pd;
        pd.r = r_of(rho);
        pd.gradr_norm = std::min(1.0, std::abs(dr_du(rho)));
        pd.lap_r = laplacian(rho, pd.r);
        pd.II_norm = 0.0;
        pd.mean_curvature = 0.0;
        // hyperspherical direction and angular density
        std::vector<double> dir(static_cast<std::size_t>(m), 1.0);
        double dens = 1.0;
        for (int j = 0; j < m - 1; ++j) {
            const double th = u[j + 1];
            if (j < m - 2) dens *= std::pow(std::sin(th), m - 2 - j);
            for (int a = j + 1; a < m; ++a) dir[a] *= std::sin(th);
            dir[j] *= std::cos(th);
        }
        pd.area_density = (rho > 0.0 ? std::pow(sn(rho, p_.k), m - 1) : 0.0) * dens;
        if (p_.k == 0.0) {
            pd.position.assign(static_cast<std::size_t>(p_.n), 0.0);
            for (int a = 0; a < m; ++a) pd.position[a] = rho * dir[a];
            pd.position[m] = d_;
        } else {
            // hyperboloid model: (x0, x1..xn) with x0^2 - |x|^2 = 1/k
            pd.position.assign(static_cast<std::size_t>(p_.n + 1), 0.0);
            const double a = rk_ * rho, b = rk_ * d_;
            pd.position[0] = std::cosh(a) * std::cosh(b) / rk_;
            for (int j = 0; j < m; ++j) pd.position[j + 1] = std::sinh(a) * dir[j] / rk_;
            pd.position[m + 1] = std::cosh(a) * std::sinh(b) / rk_;
        }
        return pd;
    }

    std::vector<double> scan_points() const override
    {
        std::vector<double> v{u_lo};
        for (double s = 1e-6; s < u_hi; s *= 1.5) v.push_back(s);
        v.push_back(u_hi);
        return v;
    }

private:
    // Lap r = r'' + (m-1) (sn'/sn)(rho) r'
    double laplacian(double rho, double r) const
    {
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        const double m1 = m - 1.0;
        if (p_.k == 0.0) return d_ * d_ / (r * r * r) + m1 / r;
        const double a = rk_ * rho, kr = rk_ * r;
        const double sech = 1.0 / std::cosh(a);
        const double ta = std::tanh(a);
        const double csch = kr < 700.0 ? 1.0 / std::sinh(kr) : 0.0;
        return rk_ / std::tanh(kr) * (m1 + sech * sech - ta * ta * csch * csch);
    }

    SpaceFormParams p_;
    double d_;
    double rk_;
};

} // namespace detail

/// Immutable catalog entry: chart data plus the monotone branches of r along the profile.
class CatalogEntry {
public:
    CatalogEntry(EntryId id, SpaceFormParams p, double offset, std::shared_ptr<const detail::Chart> chart)
        : id_(id), p_(p), offset_(offset), chart_(std::move(chart))
    {
        locate_branches();
    }

    [[nodiscard]] EntryId id() const noexcept { return id_; }
    [[nodiscard]] const SpaceFormParams& params() const noexcept { return p_; }
    [[nodiscard]] double pole_offset() const noexcept { return offset_; }
    [[nodiscard]] int chart_dim() const noexcept { return chart_->m; }
    [[nodiscard]] std::pair<double, double> profile_range() const { return {chart_->u_lo, chart_->u_hi}; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& angle_ranges() const { return chart_->angle_ranges; }
    [[nodiscard]] const std::vector<double>& reference_angles() const { return chart_->angle_ref; }
    [[nodiscard]] bool radially_symmetric() const noexcept { return true; }
    [[nodiscard]] bool in_poincare_ball() const noexcept { return chart_->ball; }

    [[nodiscard]] PointData evaluate(std::span<const double> u) const { return chart_->evaluate(u); }
    [[nodiscard]] PointData evaluate(std::initializer_list<double> u) const
    {
        return chart_->evaluate(std::span<const double>(u.begin(), u.size()));
    }
    [[nodiscard]] RadialSample radial(double u) const { return chart_->radial(u); }
    [[nodiscard]] double r_of(double u) const { return chart_->r_of(u); }
    [[nodiscard]] double dr_du(double u) const { return chart_->dr_du(u); }

    /// |IIbar|^2 - lambda^{-2}|II|^2 - m|grad^perp log lambda|^2 at u, with its terms.
    [[nodiscard]] ConformalTerms conformal_terms(std::span<const double> u) const { return chart_->conformal(u); }
    [[nodiscard]] double conformal_identity_residual(std::span<const double> u) const
    {
        return conformal_terms(u).residual;
    }

    /// Lap r minus the trace of the model Hessian of the distance, (sn'/sn)(r)(m - |grad r|^2).
    [[nodiscard]] double minimality_residual(std::span<const double> u) const
    {
        const auto pd = evaluate(u);
        const double model = cn_over_sn(pd.r, p_.k) * (p_.m - pd.gradr_norm * pd.gradr_norm);
        return pd.lap_r - model;
    }

    [[nodiscard]] const std::vector<Branch>& branches() const noexcept { return branches_; }
    [[nodiscard]] const std::vector<double>& critical_levels() const noexcept { return critical_; }
    [[nodiscard]] double r_min() const noexcept { return r_min_; }
    /// Largest r for which the chart resolves every level set.
    [[nodiscard]] double r_max() const noexcept { return r_max_; }

    [[nodiscard]] bool supports_intrinsic_distance() const noexcept
    {
        return (id_ == EntryId::totally_geodesic && offset_ == 0.0) || id_ == EntryId::euclidean_cone_clifford;
    }

    /// Profile coordinate on branch b with r = s.
    [[nodiscard]] double solve_level(const Branch& b, double s) const
    {
        if (s <= b.r_lo) return b.increasing ? b.u_lo : b.u_hi;
        if (s >= b.r_hi) return b.increasing ? b.u_hi : b.u_lo;
        auto f = [&](double u) { return chart_->r_of(u) - s; };
        boost::uintmax_t iters = 300;
        const auto pr = boost::math::tools::toms748_solve(f, b.u_lo, b.u_hi, boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (pr.first + pr.second);
    }

private:
    void locate_branches()
    {
        const auto pts = chart_->scan_points();
        std::vector<double> d(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) d[i] = chart_->dr_du(pts[i]);

        std::vector<double> cuts{chart_->u_lo};
        std::vector<double> crit_u;
        if (std::isfinite(d.front()) && std::abs(d.front()) < 1e-10) crit_u.push_back(pts.front());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (!std::isfinite(d[i]) || !std::isfinite(d[i - 1])) continue;
            if (d[i] == 0.0 && i + 1 < pts.size()) {
                cuts.push_back(pts[i]);
                crit_u.push_back(pts[i]);
            } else if (d[i - 1] != 0.0 && d[i] != 0.0 && ((d[i - 1] < 0.0) != (d[i] < 0.0))) {
                auto f = [&](double u) { return chart_->dr_du(u); };
                boost::uintmax_t iters = 200;
                const auto pr = boost::math::tools::toms748_solve(f, pts[i - 1], pts[i], boost::math::tools::eps_tolerance<double>(52), iters);
                const double uc = 0.5 * (pr.first + pr.second);
                cuts.push_back(uc);
                crit_u.push_back(uc);
            }
        }
        cuts.push_back(chart_->u_hi);

        r_min_ = std::numeric_limits<double>::infinity();
        r_max_ = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            Branch b;
            b.u_lo = cuts[i];
            b.u_hi = cuts[i + 1];
            const double ra = chart_->r_of(b.u_lo), rb = chart_->r_of(b.u_hi);
            b.increasing = rb > ra;
            b.r_lo = std::min(ra, rb);
            b.r_hi = std::max(ra, rb);
            branches_.push_back(b);
            r_min_ = std::min(r_min_, b.r_lo);
        }
        // every level below r_max meets each unbounded end
        const double r_lo_end = chart_->r_of(chart_->u_lo), r_hi_end = chart_->r_of(chart_->u_hi);
        r_max_ = r_hi_end;
        if (branches_.front().increasing == false) r_max_ = std::min(r_max_, r_lo_end);
        for (double uc : crit_u) critical_.push_back(chart_->r_of(uc));
        std::sort(critical_.begin(), critical_.end());
        critical_.erase(std::unique(critical_.begin(), critical_.end(),
                                    [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
                        critical_.end());
    }

    EntryId id_;
    SpaceFormParams p_;
    double offset_;
    std::shared_ptr<const detail::Chart> chart_;
    std::vector<Branch> branches_;
    std::vector<double> critical_;
    double r_min_ = 0.0, r_max_ = 0.0;
};

/// Builds a catalog entry; rejects unsupported (id, m, n, k, offset) combinations.
[[nodiscard]] inline CatalogEntry make_entry(EntryId id, const SpaceFormParams& p, double pole_offset = 0.0)
{
    p.validate();
    if (!(pole_offset >= 0.0) || !std::isfinite(pole_offset)) throw ConfigError("pole_offset must be finite and >= 0");
    using std::numbers::pi;
    switch (id) {
    case EntryId::totally_geodesic:
        return CatalogEntry(id, p, pole_offset, std::make_shared<detail::TotallyGeodesicChart>(p, pole_offset));
    case EntryId::euclidean_cone_clifford:
        if (p.m != 3 || p.n != 4 || p.k != 0.0) throw ConfigError("euclidean_cone_clifford requires m=3, n=4, k=0");
        if (pole_offset != 0.0) throw ConfigError("euclidean_cone_clifford supports pole_offset 0 only");
        return CatalogEntry(id, p, 0.0,
                            std::make_shared<detail::EmbeddedChart<detail::CliffordConeMap>>(
                                detail::CliffordConeMap{}, 0.0, 1e12,
                                std::vector<std::pair<double, double>>{{0.0, 2 * pi}, {0.0, 2 * pi}},
                                std::vector<double>{0.3, 0.7}, 4 * pi * pi, false, true));
    case EntryId::euclidean_catenoid:
        if (p.m != 2 || p.n != 3 || p.k != 0.0) throw ConfigError("euclidean_catenoid requires m=2, n=3, k=0");
        if (pole_offset != 0.0) throw ConfigError("euclidean_catenoid supports pole_offset 0 only");
        return CatalogEntry(id, p, 0.0,
                            std::make_shared<detail::EmbeddedChart<detail::CatenoidMap>>(
                                detail::CatenoidMap{}, -40.0, 40.0,
                                std::vector<std::pair<double, double>>{{0.0, 2 * pi}}, std::vector<double>{0.3},
                                2 * pi, false, false));
    case EntryId::hyperbolic_plane_poincare:
        if (p.m != 2 || p.n != 3 || p.k != 1.0) throw ConfigError("hyperbolic_plane_poincare requires m=2, n=3, k=1");
        return CatalogEntry(id, p, pole_offset,
                            std::make_shared<detail::EmbeddedChart<detail::PoincarePlaneMap>>(
                                detail::PoincarePlaneMap{std::tanh(0.5 * pole_offset)}, 0.0, 18.0,
                                std::vector<std::pair<double, double>>{{0.0, 2 * pi}}, std::vector<double>{0.3},
                                2 * pi, true, true));
    }
    throw ConfigError("unsupported entry");
}

} // namespace densitylab
