#pragma once

// Splitting-ratio optimization: maximize Theta1(rho) * Theta2(rho) over the
// box [0,1]^K. The problem is non-convex; K = 1 has the closed-form optimum
// rho = 1/3, small K is handled by an exhaustive grid plus a local polish,
// and larger K by multistart projected coordinate ascent. Also the
// simplified-receiver antenna partition search and its large-K rate formula.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "splitrx/channel.hpp"
#include "splitrx/rng.hpp"
#include "splitrx/special.hpp"

namespace splitrx {

struct RatioSolution {
    SplitConfig rho;
    double objective = 0.0;  // Theta1 * Theta2 at rho
    enum class Method { closed_form_k1, grid, multistart_local } method =
        Method::grid;
    bool degenerate = false;   // all channel gains are zero
    bool on_boundary = false;  // some coordinate sits at 0 or 1
};

struct P1Options {
    double grid_resolution = 0.01;  // per axis, K <= 3
    unsigned restarts = 64;         // K > 3
    std::uint64_t seed = 1;
};

namespace detail {

inline double p1_objective(const std::vector<double>& gains2,
                           const std::vector<double>& rho) {
    double t1 = 0.0;
    double t2 = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        t1 += rho[k] * gains2[k];
        const double u = 1.0 - rho[k];
        t2 += u * u * gains2[k] * gains2[k];
    }
    return t1 * t2;
}

// Exact single-coordinate maximizer of (A + rho a)(B + (1-rho)^2 b) on [0,1],
// where A, B collect the other coordinates. The derivative is quadratic in
// u = 1 - rho: 3ab u^2 - 2b(A+a) u + aB = 0.
inline double p1_best_coordinate(double A, double B, double a, double b) {
    double best_rho = 0.0;
    double best_val = A * (B + b);  // rho = 0 -> u = 1
    const auto consider = [&](double rho) {
        if (!(rho >= 0.0 && rho <= 1.0)) return;
        const double u = 1.0 - rho;
        const double val = (A + rho * a) * (B + u * u * b);
        if (val > best_val) {
            best_val = val;
            best_rho = rho;
        }
    };
    consider(1.0);
    if (a > 0.0 && b > 0.0) {
        const double c2 = 3.0 * a * b;
        const double c1 = -2.0 * b * (A + a);
        const double c0 = a * B;
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            consider(1.0 - (-c1 + sq) / (2.0 * c2));
            consider(1.0 - (-c1 - sq) / (2.0 * c2));
        }
    }
    return best_rho;
}

inline double p1_coordinate_ascent(const std::vector<double>& gains2,
                                   std::vector<double>& rho, int max_sweeps = 200) {
    const std::size_t k = gains2.size();
    double t1 = 0.0;
    double t2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        t1 += rho[i] * gains2[i];
        const double u = 1.0 - rho[i];
        t2 += u * u * gains2[i] * gains2[i];
    }
    double value = t1 * t2;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double before = value;
        for (std::size_t i = 0; i < k; ++i) {
            const double a = gains2[i];
            const double b = a * a;
            const double A = t1 - rho[i] * a;
            const double ui = 1.0 - rho[i];
            const double B = t2 - ui * ui * b;
            const double r = p1_best_coordinate(A, B, a, b);
            rho[i] = r;
            const double u = 1.0 - r;
            t1 = A + r * a;
            t2 = B + u * u * b;
        }
        value = t1 * t2;
        if (value - before <= 1e-15 * std::max(1.0, value)) break;
    }
    return value;
}

}  // namespace detail

inline RatioSolution solve_p1(const ChannelRealization& ch, const P1Options& opts = {}) {
    const std::size_t k = ch.antennas();
    std::vector<double> gains2(k);
    for (std::size_t i = 0; i < k; ++i) gains2[i] = std::norm(ch.gains[i]);

    RatioSolution sol;
    if (std::all_of(gains2.begin(), gains2.end(), [](double g) { return g == 0.0; })) {
        sol.rho = SplitConfig::uniform(k, 0.5);
        sol.objective = 0.0;
        sol.degenerate = true;
        return sol;
    }

    if (k == 1) {
        sol.rho = SplitConfig(std::vector<double>{1.0 / 3.0});
        sol.objective = detail::p1_objective(gains2, sol.rho.rho);
        sol.method = RatioSolution::Method::closed_form_k1;
        return sol;
    }

    std::vector<double> best_rho(k, 1.0 / 3.0);
    double best_val = -1.0;

    const auto try_start = [&](std::vector<double> start) {
        const double val = detail::p1_coordinate_ascent(gains2, start);
        if (val > best_val) {
            best_val = val;
            best_rho = std::move(start);
        }
    };

    if (k <= 3) {
        const int steps = static_cast<int>(std::round(1.0 / opts.grid_resolution));
        std::vector<int> idx(k, 0);
        std::vector<double> rho(k, 0.0);
        std::vector<double> grid_best(k, 0.0);
        double grid_val = -1.0;
        for (;;) {
            for (std::size_t i = 0; i < k; ++i) rho[i] = idx[i] * opts.grid_resolution;
            const double val = detail::p1_objective(gains2, rho);
            if (val > grid_val) {
                grid_val = val;
                grid_best = rho;
            }
            std::size_t d = 0;
            while (d < k && ++idx[d] > steps) idx[d++] = 0;
            if (d == k) break;
        }
        try_start(grid_best);  // one local polish from the best cell
        sol.method = RatioSolution::Method::grid;
    } else {
        Rng rng(opts.seed);
        try_start(std::vector<double>(k, 1.0 / 3.0));
        try_start(std::vector<double>(k, 0.5));
        for (unsigned r = 0; r < opts.restarts; ++r) {
            std::vector<double> start(k);
            for (auto& v : start) v = 0.05 + 0.9 * rng.uniform();
            try_start(std::move(start));
        }
        sol.method = RatioSolution::Method::multistart_local;
    }

    // boundary candidates: ascent seeded from every hard CD/PD partition of
    // the antennas in the given order
    for (std::size_t k1 = 1; k1 < k; ++k1) {
        std::vector<double> start(k, 0.0);
        for (std::size_t i = 0; i < k1; ++i) start[i] = 1.0;
        try_start(std::move(start));
    }

    sol.rho = SplitConfig(best_rho);
    sol.objective = best_val;
    sol.on_boundary = std::any_of(best_rho.begin(), best_rho.end(),
                                  [](double v) { return v == 0.0 || v == 1.0; });
    return sol;
}

enum class AntennaOrdering { given, sorted_by_gain };

struct PartitionResult {
    std::size_t k1 = 0;      // antennas on the coherent side
    double objective = 0.0;  // Theta1 * Theta2 of the induced binary split
    std::vector<std::size_t> order;
};

// Exhaustive search over K1 in [1, K-1]: the first K1 antennas (under the
// chosen ordering) feed the coherent branch, the rest the power branch.
// Ties break toward smaller K1.
inline PartitionResult best_simplified_partition(
    const ChannelRealization& ch, AntennaOrdering ordering = AntennaOrdering::given) {
    const std::size_t k = ch.antennas();
    if (k < 2)
        throw std::invalid_argument("best_simplified_partition: need at least 2 antennas");
    PartitionResult res;
    res.order.resize(k);
    std::iota(res.order.begin(), res.order.end(), std::size_t{0});
    if (ordering == AntennaOrdering::sorted_by_gain) {
        std::stable_sort(res.order.begin(), res.order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return std::norm(ch.gains[a]) > std::norm(ch.gains[b]);
                         });
    }
    std::vector<double> g2(k);
    for (std::size_t i = 0; i < k; ++i) g2[i] = std::norm(ch.gains[res.order[i]]);

    double suffix4 = 0.0;
    for (double g : g2) suffix4 += g * g;
    double prefix2 = 0.0;
    double best = -1.0;
    for (std::size_t k1 = 1; k1 < k; ++k1) {
        prefix2 += g2[k1 - 1];
        suffix4 -= g2[k1 - 1] * g2[k1 - 1];
        const double val = prefix2 * suffix4;
        if (val > best) {
            best = val;
            res.k1 = k1;
        }
    }
    res.objective = best;
    return res;
}

// Large-K rate of the half/half simplified receiver:
//   log2(K P^{3/2} sqrt(E|h|^2 E|h|^4) / (sqrt(2) sigma1 sigma2)) - gamma/(2 ln 2).
inline double simplified_mi_large_k(const LinkBudget& lb, std::size_t k, double moment2,
                                    double moment4) {
    return std::log2(static_cast<double>(k) * std::pow(lb.power, 1.5) *
                     std::sqrt(moment2 * moment4) /
                     (std::numbers::sqrt2 * lb.sigma1() * lb.sigma2())) -
           euler_gamma / (2.0 * ln2);
}

}  // namespace splitrx
