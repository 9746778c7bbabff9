#pragma once

// Scalar special functions used by the analytical expressions: the Gaussian
// Q-function, the exponential integral E1, and the exponentially modified
// Gaussian density of the power-detector output.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace splitrx {

// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

inline constexpr double ln2 = std::numbers::ln2;

// Gaussian tail probability Q(x) = erfc(x / sqrt(2)) / 2.
inline double q_func(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace detail {

// Power series for E1, 0 < x <= 1:
//   E1(x) = -gamma - ln(x) - sum_{n>=1} (-x)^n / (n n!)
inline double e1_series(double x) {
    double sum = 0.0;
    double term = x;  // n = 1
    for (int n = 1; n <= 60; ++n) {
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        term *= -x * n / ((n + 1.0) * (n + 1.0));
    }
    return -euler_gamma - std::log(x) + sum;
}

// Modified Lentz evaluation of the continued fraction
//   exp(x) E1(x) = 1 / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
// Accurate for x >= 1.
inline double e1_cf_scaled(double x) {
    constexpr double tiny = 1e-300;
    double f = x + 1.0;
    if (f == 0.0) f = tiny;
    double c = f;
    double d = 0.0;
    for (int n = 1; n <= 200; ++n) {
        const double a = -static_cast<double>(n) * n;
        const double b = x + 2.0 * n + 1.0;
        d = b + a * d;
        if (d == 0.0) d = tiny;
        c = b + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

}  // namespace detail

// E1(x) = integral_x^inf exp(-t)/t dt for x > 0. Series below x = 1,
// continued fraction above; relative error <= 1e-12 across (1e-12, 700).
inline double exp_integral_e1(double x) {
    if (!(x > 0.0))
        throw std::domain_error("exp_integral_e1: argument must be positive, got " +
                                std::to_string(x));
    if (x <= 1.0) return detail::e1_series(x);
    return std::exp(-x) * detail::e1_cf_scaled(x);
}

// exp(x) * E1(x), free of under/overflow for any positive x.
inline double exp_e1_scaled(double x) {
    if (!(x > 0.0))
        throw std::domain_error("exp_e1_scaled: argument must be positive, got " +
                                std::to_string(x));
    if (x <= 1.0) return std::exp(x) * detail::e1_series(x);
    return detail::e1_cf_scaled(x);
}

namespace detail {

// log(erfcx(q)) for large q via the asymptotic series
//   erfcx(q) ~ 1/(q sqrt(pi)) (1 - 1/(2q^2) + 3/(4q^4) - 15/(8q^6) + ...)
inline double log_erfcx_large(double q) {
    const double r = 1.0 / (q * q);
    const double series = 1.0 + r * (-0.5 + r * (0.75 + r * (-1.875 + r * 6.5625)));
    return std::log(series / (q * std::sqrt(std::numbers::pi)));
}

// log(erfc(q)) valid for all finite q without underflow.
inline double log_erfc(double q) {
    if (q < 26.0) return std::log(std::erfc(q));
    return -q * q + log_erfcx_large(q);
}

}  // namespace detail

// Parameters of the exponentially modified Gaussian marginal of the combined
// power observation under a Gaussian input: Y = scale * E + N with
// E ~ Exp(1) and N ~ N(0, noise_sd^2).
struct EmgParams {
    double scale;     // sqrt(H4) * P
    double noise_sd;  // sigma2

    EmgParams(double scale_, double noise_sd_) : scale(scale_), noise_sd(noise_sd_) {
        if (!(scale > 0.0) || !(noise_sd > 0.0))
            throw std::domain_error("EmgParams: scale and noise_sd must be positive");
    }
};

// log f_Y(y) with f the EMG density
//   f(y) = 1/(2s) exp((1/(2s)) (sd^2/s - 2y)) erfc((sd^2/s - y) / (sqrt(2) sd)).
// The exp factor overflows on the left tail where erfc underflows; there the
// product is assembled through erfcx, using the algebraic identity
//   arg - q^2 = -y^2 / (2 sd^2),
// which also removes the catastrophic cancellation that appears when
// s << sd^2 (arg and q^2 both huge, difference order one).
inline double emg_log_pdf(const EmgParams& p, double y) {
    const double s = p.scale;
    const double sd = p.noise_sd;
    const double a = sd * sd / s;
    const double q = (a - y) / (std::numbers::sqrt2 * sd);
    if (q <= 0.0) {
        // arg < 0 here; no overflow, erfc in [1, 2)
        const double arg = (a - 2.0 * y) / (2.0 * s);
        return -std::log(2.0 * s) + arg + std::log(std::erfc(q));
    }
    const double log_erfcx =
        q < 26.0 ? q * q + std::log(std::erfc(q)) : detail::log_erfcx_large(q);
    return -std::log(2.0 * s) - y * y / (2.0 * sd * sd) + log_erfcx;
}

inline double emg_pdf(const EmgParams& p, double y) {
    const double lf = emg_log_pdf(p, y);
    return lf < -745.0 ? 0.0 : std::exp(lf);
}

}  // namespace splitrx
