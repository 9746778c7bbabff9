#pragma once

// Test-only reference implementations, deliberately independent of the
// library's evaluation paths: plain adaptive Simpson quadrature and integral
// representations of the functions under test. Expected values in the test
// files are frozen from these oracles.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_step(const F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol || depth <= 0)
        return left + right + delta / 15.0;
    const double child_tol = std::max(0.5 * tol, 1e-17);
    return adaptive_step(f, a, m, fa, flm, fm, left, child_tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, child_tol, depth - 1);
}

}  // namespace detail

template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-13, int depth = 52) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Piecewise integration with interior knots, for integrands with features
// much narrower than the full range.
template <class F>
double integrate_panels(const F& f, std::vector<double> knots, double tol = 1e-14) {
    std::sort(knots.begin(), knots.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        acc += integrate(f, knots[i], knots[i + 1], tol);
    return acc;
}

// Gaussian tail Q(x) by quadrature of the standard normal density.
inline double q(double x) {
    const auto phi = [](double t) {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    };
    if (x < 0.0) return 1.0 - q(-x);
    return integrate(phi, x, x + 42.0, 1e-15);
}

// exp(x) E1(x) through the substitution t = x e^v:
//   exp(x) E1(x) = integral_0^inf exp(-x (e^v - 1)) dv.
// The scaled integrand is O(1) for every x, so absolute tolerances hold.
inline double e1_scaled(double x) {
    const double vmax = std::log1p(720.0 / x);
    const auto f = [x](double v) { return std::exp(-x * std::expm1(v)); };
    return integrate(f, 0.0, vmax, 1e-15 * std::max(1.0, vmax));
}

inline double e1(double x) { return std::exp(-x) * e1_scaled(x); }

// Density of s * Exp(1) + N(0, sd^2) by direct convolution; panels around the
// Gaussian spike keep the quadrature from stepping over it.
inline double emg_conv(double s, double sd, double y) {
    const auto f = [=](double t) {
        const double g = (y - t) / sd;
        return std::exp(-t / s) / s *
               std::exp(-0.5 * g * g) / (sd * std::sqrt(2.0 * std::numbers::pi));
    };
    const double hi = std::max(y + 14.0 * sd, 14.0 * sd) + 60.0 * s;
    std::vector<double> knots{0.0, hi};
    for (double k : {y - 12.0 * sd, y - 4.0 * sd, y, y + 4.0 * sd, y + 12.0 * sd})
        if (k > 0.0 && k < hi) knots.push_back(k);
    return integrate_panels(f, std::move(knots), 1e-15);
}

}  // namespace oracles
