#pragma once

// Mutual information of the splitting channel under a Gaussian input:
// closed forms at the two conventional-receiver boundaries, the exact
// power-only value by quadrature of the EMG marginal, a Monte-Carlo
// histogram estimator over the three-dimensional received-signal space, the
// high-SNR analytic approximations, and the joint processing gain.

#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "splitrx/channel.hpp"
#include "splitrx/parallel.hpp"
#include "splitrx/quadrature.hpp"
#include "splitrx/rng.hpp"
#include "splitrx/special.hpp"

namespace splitrx {

// Capacity of the coherent AWGN channel, reached at rho = 1.
inline double mi_coherent_closed_form(const ChannelRealization& ch, const LinkBudget& lb) {
    return std::log2(1.0 + ch.h2 * lb.power / lb.sigma1_sq);
}

// High-SNR lower bound on the power-only mutual information (rho = 0):
//   (1/2) log2(1 + H4 P^2 e / (2 pi sigma2^2)).
// Entropy-power argument; valid as a bound at every SNR.
inline double mi_noncoherent_lower_bound(const ChannelRealization& ch,
                                         const LinkBudget& lb) {
    const double e = std::numbers::e;
    return 0.5 * std::log2(1.0 + ch.h4 * lb.power * lb.power * e /
                                     (2.0 * std::numbers::pi * lb.sigma2_sq));
}

// Exact power-only mutual information h(Y2) - h(N), with Y2 following the
// EMG marginal. Evaluated by adaptive quadrature of -f log2 f.
inline double mi_noncoherent_exact(const ChannelRealization& ch, const LinkBudget& lb,
                                   double quadrature_tol = 1e-9) {
    if (ch.h4 == 0.0) return 0.0;
    const double s = std::sqrt(ch.h4) * lb.power;
    const double sd = lb.sigma2();
    const EmgParams p(s, sd);
    const auto integrand = [&p](double y) {
        const double lf = emg_log_pdf(p, y);
        if (lf < -700.0) return 0.0;
        return -std::exp(lf) * lf / ln2;
    };
    const double lo = -14.0 * sd;
    const double hi = 60.0 * s + 14.0 * sd;
    const double h_y2 = integrate(integrand, lo, hi, quadrature_tol, 20000);
    const double h_n = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e *
                                       lb.sigma2_sq);
    return h_y2 - h_n;
}

enum class HighSnrForm { ei, log };

// High-SNR approximation for interior splitting ratios. The `ei` form is
//   log2(Theta1 P / sigma1^2) + exp(u) E1(u) / (2 ln 2),
//   u = Theta1 sigma2^2 / (2 Theta2 sigma1^2 P);
// the `log` form is its P -> inf limit
//   log2(sqrt(2) P^{3/2} sqrt(Theta1 Theta2) / (sigma1 sigma2)) - gamma/(2 ln 2).
inline double mi_high_snr_approx(const ThetaPair& theta, const LinkBudget& lb,
                                 HighSnrForm form) {
    if (!(theta.theta1 > 0.0) || !(theta.theta2 > 0.0))
        throw std::domain_error(
            "mi_high_snr_approx: boundary splitting ratio; use "
            "mi_coherent_closed_form (rho = 1) or the non-coherent forms (rho = 0)");
    if (form == HighSnrForm::ei) {
        const double u = theta.theta1 * lb.sigma2_sq /
                         (2.0 * theta.theta2 * lb.sigma1_sq * lb.power);
        return std::log2(theta.theta1 * lb.power / lb.sigma1_sq) +
               exp_e1_scaled(u) / (2.0 * ln2);
    }
    return std::log2(std::numbers::sqrt2 * std::pow(lb.power, 1.5) *
                     std::sqrt(theta.theta1 * theta.theta2) /
                     (lb.sigma1() * lb.sigma2())) -
           euler_gamma / (2.0 * ln2);
}

inline double mi_high_snr_approx(const ChannelRealization& ch, const SplitConfig& cfg,
                                 const LinkBudget& lb, HighSnrForm form) {
    return mi_high_snr_approx(compute_theta(ch, cfg), lb, form);
}

struct MiEstimate {
    double bits = 0.0;
    std::uint64_t samples = 0;
    std::uint32_t bins_per_axis = 0;
    double std_err = 0.0;      // delete-one-batch jackknife, 10 batches
    int histogram_dim = 0;     // 3, or fewer when a boundary collapses an axis
    bool undersampled = false; // samples < bins^dim
};

namespace detail {

struct MiHistPlan {
    int dim;                      // number of live axes
    bool use_y1;                  // coherent axes live
    bool use_y2;                  // power axis live
    double lo[3], width[3];       // per-axis range
};

inline void mi_extract(const SplitSample& s, const MiHistPlan& plan, double out[3]) {
    int a = 0;
    if (plan.use_y1) {
        out[a++] = s.y1.real();
        out[a++] = s.y1.imag();
    }
    if (plan.use_y2) out[a++] = s.y2;
}

}  // namespace detail

// Monte-Carlo histogram estimate of I(sqrt(P) X; Y1, Y2) with X ~ CN(0,1).
// The joint entropy of the received triple is estimated on a per-axis grid
// spanning the empirical mean +/- 6 standard deviations, and the exact noise
// entropies are subtracted. A boundary ratio makes one output pure noise; the
// estimator then drops that axis and subtracts only the remaining noise
// entropy, keeping the estimate unbiased.
inline MiEstimate mi_mc_histogram(const ChannelRealization& ch, const SplitConfig& cfg,
                                  const LinkBudget& lb, std::uint64_t samples,
                                  std::uint32_t bins, std::uint64_t seed) {
    if (samples < 10000)
        throw std::invalid_argument("mi_mc_histogram: need at least 1e4 samples");
    if (bins < 8) throw std::invalid_argument("mi_mc_histogram: need at least 8 bins");

    const ThetaPair theta = compute_theta(ch, cfg);
    {
        const double dim_guess = (theta.theta1 > 0.0 ? 2 : 0) + (theta.theta2 > 0.0 ? 1 : 0);
        if (std::pow(static_cast<double>(bins), dim_guess) > double(1ull << 25))
            throw std::invalid_argument(
                "mi_mc_histogram: bins^dim exceeds 2^25 cells; use fewer bins");
    }
    detail::MiHistPlan plan{};
    plan.use_y1 = theta.theta1 > 0.0;
    plan.use_y2 = theta.theta2 > 0.0;
    plan.dim = (plan.use_y1 ? 2 : 0) + (plan.use_y2 ? 1 : 0);
    if (plan.dim == 0) {
        // both outputs are pure noise
        return {0.0, samples, bins, 0.0, 0, false};
    }

    constexpr std::uint64_t kBatches = 10;
    const std::uint64_t n_chunks =
        std::max<std::uint64_t>(2 * kBatches, (samples + (1u << 19) - 1) >> 19);
    const std::uint64_t chunk_size = (samples + n_chunks - 1) / n_chunks;

    const auto chunk_span = [&](std::uint64_t c) {
        const std::uint64_t begin = c * chunk_size;
        const std::uint64_t end = std::min(samples, begin + chunk_size);
        return end > begin ? end - begin : 0;
    };

    // pass 1: per-axis mean and standard deviation, combined in chunk order
    struct Moments {
        double sum[3] = {0, 0, 0};
        double sumsq[3] = {0, 0, 0};
    };
    std::vector<Moments> chunk_moments(n_chunks);
    parallel_for(n_chunks, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        Moments m;
        const std::uint64_t n = chunk_span(c);
        double v[3];
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto x = rng.complex_normal(1.0);
            const SplitSample s = sample_splitting_channel(theta, lb, x, rng);
            detail::mi_extract(s, plan, v);
            for (int a = 0; a < plan.dim; ++a) {
                m.sum[a] += v[a];
                m.sumsq[a] += v[a] * v[a];
            }
        }
        chunk_moments[c] = m;
    });
    Moments total_m;
    for (const auto& m : chunk_moments)
        for (int a = 0; a < 3; ++a) {
            total_m.sum[a] += m.sum[a];
            total_m.sumsq[a] += m.sumsq[a];
        }
    const double nd = static_cast<double>(samples);
    for (int a = 0; a < plan.dim; ++a) {
        const double mean = total_m.sum[a] / nd;
        const double var = std::max(total_m.sumsq[a] / nd - mean * mean, 0.0);
        const double sd = std::sqrt(var);
        plan.lo[a] = mean - 6.0 * sd;
        plan.width[a] = 12.0 * sd;
    }

    // pass 2: integer cell counts per batch (chunk c feeds batch c mod 10)
    std::uint64_t cells = 1;
    for (int a = 0; a < plan.dim; ++a) cells *= bins;
    std::vector<std::vector<std::uint32_t>> batch_counts(
        kBatches, std::vector<std::uint32_t>(cells, 0));
    std::uint64_t batch_samples[kBatches] = {0};
    for (std::uint64_t c = 0; c < n_chunks; ++c) batch_samples[c % kBatches] += chunk_span(c);
    std::mutex batch_mutex[kBatches];

    parallel_for(n_chunks, [&](std::size_t c) {
        const std::uint64_t n = chunk_span(c);
        if (n == 0) return;
        Rng rng(derive_seed(seed, c));
        std::vector<std::uint32_t> local(cells, 0);
        double v[3];
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto x = rng.complex_normal(1.0);
            const SplitSample s = sample_splitting_channel(theta, lb, x, rng);
            detail::mi_extract(s, plan, v);
            std::uint64_t idx = 0;
            for (int a = 0; a < plan.dim; ++a) {
                double t = (v[a] - plan.lo[a]) / plan.width[a] * bins;
                long cell = static_cast<long>(t);
                if (cell < 0) cell = 0;
                if (cell >= static_cast<long>(bins)) cell = bins - 1;
                idx = idx * bins + static_cast<std::uint64_t>(cell);
            }
            ++local[idx];
        }
        std::lock_guard<std::mutex> lock(batch_mutex[c % kBatches]);
        auto& dst = batch_counts[c % kBatches];
        for (std::uint64_t i = 0; i < cells; ++i) dst[i] += local[i];
    });

    // plug-in entropy from the pooled counts, plus delete-one-batch replicates
    double cell_log_volume = 0.0;
    for (int a = 0; a < plan.dim; ++a) cell_log_volume += std::log2(plan.width[a] / bins);

    double noise_entropy = 0.0;
    if (plan.use_y1)
        noise_entropy += std::log2(std::numbers::pi * std::numbers::e * lb.sigma1_sq);
    if (plan.use_y2)
        noise_entropy +=
            0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * lb.sigma2_sq);

    double sum_clogc_total = 0.0;
    double sum_clogc_jack[kBatches] = {0};  // sum over cells of c_{-b} log2 c_{-b}
    for (std::uint64_t i = 0; i < cells; ++i) {
        std::uint64_t ct = 0;
        std::uint32_t per_batch[kBatches];
        for (std::uint64_t b = 0; b < kBatches; ++b) {
            per_batch[b] = batch_counts[b][i];
            ct += per_batch[b];
        }
        if (ct == 0) continue;
        const double ctd = static_cast<double>(ct);
        sum_clogc_total += ctd * std::log2(ctd);
        for (std::uint64_t b = 0; b < kBatches; ++b) {
            const double cb = static_cast<double>(ct - per_batch[b]);
            if (cb > 0.0) sum_clogc_jack[b] += cb * std::log2(cb);
        }
    }

    const auto estimate_from = [&](double sum_clogc, double n) {
        const double h_disc = std::log2(n) - sum_clogc / n;
        return h_disc + cell_log_volume - noise_entropy;
    };

    MiEstimate out;
    out.bits = estimate_from(sum_clogc_total, nd);
    out.samples = samples;
    out.bins_per_axis = bins;
    out.histogram_dim = plan.dim;
    double undersample_cells = 1.0;
    for (int a = 0; a < plan.dim; ++a) undersample_cells *= bins;
    out.undersampled = nd < undersample_cells;

    double jack[kBatches];
    double jack_mean = 0.0;
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        jack[b] = estimate_from(sum_clogc_jack[b],
                                nd - static_cast<double>(batch_samples[b]));
        jack_mean += jack[b];
    }
    jack_mean /= kBatches;
    double ss = 0.0;
    for (std::uint64_t b = 0; b < kBatches; ++b)
        ss += (jack[b] - jack_mean) * (jack[b] - jack_mean);
    out.std_err = std::sqrt((kBatches - 1.0) / kBatches * ss);
    return out;
}

struct MiGainResult {
    double gain = 0.0;
    SplitConfig argmax;
    double best_bits = 0.0;        // best over the full grid including endpoints
    double coherent_bits = 0.0;    // rho = 1 closed form
    double noncoherent_bits = 0.0; // rho = 0 closed form
};

// Joint processing gain: the grid supremum of the mutual information divided
// by the better of the two conventional receivers. Boundary grid points are
// scored by the closed forms, never by the caller's estimator.
inline MiGainResult joint_processing_gain_mi(
    const ChannelRealization& ch, const LinkBudget& lb,
    const std::vector<SplitConfig>& rho_grid,
    const std::function<double(const SplitConfig&)>& interior_mi) {
    MiGainResult r;
    r.coherent_bits = mi_coherent_closed_form(ch, lb);
    r.noncoherent_bits = mi_noncoherent_lower_bound(ch, lb);
    const double endpoint_best = std::max(r.coherent_bits, r.noncoherent_bits);
    r.best_bits = r.coherent_bits;
    r.argmax = SplitConfig::all_coherent(ch.antennas());
    if (r.noncoherent_bits > r.best_bits) {
        r.best_bits = r.noncoherent_bits;
        r.argmax = SplitConfig::all_power(ch.antennas());
    }
    for (const auto& cfg : rho_grid) {
        if (cfg.is_all_coherent() || cfg.is_all_power()) continue;
        const double bits = interior_mi(cfg);
        if (bits > r.best_bits) {
            r.best_bits = bits;
            r.argmax = cfg;
        }
    }
    r.gain = r.best_bits / endpoint_best;
    return r;
}

// Uniform scalar grid rho in {0, step, 2 step, ..., 1} applied to all antennas.
inline std::vector<SplitConfig> uniform_rho_grid(std::size_t antennas, double step) {
    std::vector<SplitConfig> grid;
    const int n = static_cast<int>(std::round(1.0 / step));
    for (int i = 0; i <= n; ++i)
        grid.push_back(SplitConfig::uniform(antennas, std::min(1.0, i * step)));
    return grid;
}

}  // namespace splitrx
