#pragma once

// Adaptive Gauss-Kronrod 15(7) quadrature on finite intervals. Used for the
// entropy integral of the power-detector marginal; error control is by
// interval bisection on the embedded-rule difference.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitrx {

namespace detail {

// 15-point Kronrod nodes/weights on [-1, 1] and the embedded 7-point Gauss
// weights (nodes at the even Kronrod positions).
inline constexpr double gk_nodes[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double gk_weights[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr double g7_weights[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct GkResult {
    double value;
    double error;
};

template <class F>
GkResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fv = f(c + h * gk_nodes[i]);
        kronrod += gk_weights[i] * fv;
        if (i % 2 == 1) gauss += g7_weights[i / 2] * fv;
    }
    kronrod *= h;
    gauss *= h;
    return {kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance abs_tol. Throws on
// non-convergence with the achieved error estimate in the message.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                 int max_intervals = 4000) {
    struct Segment {
        double a, b, value, error;
    };
    auto first = detail::gk15(f, a, b);
    std::vector<Segment> segs{{a, b, first.value, first.error}};
    double total_err = first.error;
    while (total_err > abs_tol) {
        if (static_cast<int>(segs.size()) >= max_intervals)
            throw std::runtime_error(
                "integrate: failed to reach tolerance " + std::to_string(abs_tol) +
                " over [" + std::to_string(a) + ", " + std::to_string(b) +
                "]; error estimate " + std::to_string(total_err) + " with " +
                std::to_string(segs.size()) + " intervals");
        // split the segment with the largest error estimate
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const Segment s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b)
            throw std::runtime_error("integrate: interval underflow at x = " +
                                     std::to_string(s.a));
        const auto left = detail::gk15(f, s.a, mid);
        const auto right = detail::gk15(f, mid, s.b);
        total_err += left.error + right.error - s.error;
        segs[worst] = {s.a, mid, left.value, left.error};
        segs.push_back({mid, s.b, right.value, right.error});
    }
    double sum = 0.0;
    for (const auto& s : segs) sum += s.value;
    return sum;
}

}  // namespace splitrx
