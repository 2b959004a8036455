#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace densitylab {

/// Quadrature value with an absolute error estimate.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;

    QuadResult& operator+=(const QuadResult& o) noexcept
    {
        value += o.value;
        error += o.error;
        return *this;
    }
};

inline constexpr unsigned kDefaultQuadDepth = 10;

/// Adaptive 31-point Gauss-Kronrod on [a, b]; tolerance is relative to the L1 norm.
template <class F>
[[nodiscard]] QuadResult integrate_gk(F&& f, double a, double b, double rel_tol,
                                      unsigned max_depth = kDefaultQuadDepth)
{
    if (!(b > a)) return {};
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, max_depth, rel_tol, &err, &l1);
    // Kronrod difference underestimates for very smooth integrands; keep a roundoff floor.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    return {v, std::max(err, floor)};
}

} // namespace densitylab
