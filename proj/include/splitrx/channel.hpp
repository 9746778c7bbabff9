#pragma once

// Channel realizations, per-antenna power-splitting configuration, the
// combined-branch effective gains (Theta1, Theta2), SNR bookkeeping, and the
// forward sampler of the two-output splitting channel
//   Y1 = sqrt(Theta1 P) X + Z,   Y2 = sqrt(Theta2) P |X|^2 + N,
// with Z complex Gaussian (variance sigma1^2) and N real Gaussian
// (variance sigma2^2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitrx/rng.hpp"

namespace splitrx {

struct ChannelRealization {
    std::vector<std::complex<double>> gains;
    double h2 = 0.0;  // sum |h_k|^2
    double h4 = 0.0;  // sum |h_k|^4

    ChannelRealization() = default;

    explicit ChannelRealization(std::vector<std::complex<double>> g)
        : gains(std::move(g)) {
        if (gains.empty())
            throw std::invalid_argument("ChannelRealization: need at least one antenna");
        for (const auto& h : gains) {
            const double p = std::norm(h);
            h2 += p;
            h4 += p * p;
        }
    }

    std::size_t antennas() const { return gains.size(); }

    // All antennas share the same real gain (free-space scenario).
    static ChannelRealization identical(std::size_t k, double amplitude = 1.0) {
        return ChannelRealization(
            std::vector<std::complex<double>>(k, {amplitude, 0.0}));
    }
};

// i.i.d. circularly-symmetric complex Gaussian gains with unit mean power,
// so |h_k|^2 is exponential with mean 1.
inline ChannelRealization sample_channel_iid_rayleigh(std::size_t k, std::uint64_t seed) {
    if (k == 0)
        throw std::invalid_argument("sample_channel_iid_rayleigh: k must be >= 1");
    Rng rng(seed);
    std::vector<std::complex<double>> g(k);
    for (auto& h : g) h = rng.complex_normal(1.0);
    return ChannelRealization(std::move(g));
}

struct SplitConfig {
    std::vector<double> rho;

    SplitConfig() = default;

    explicit SplitConfig(std::vector<double> r) : rho(std::move(r)) {
        for (double v : rho)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("SplitConfig: rho entries must lie in [0,1]");
    }

    static SplitConfig uniform(std::size_t k, double value) {
        return SplitConfig(std::vector<double>(k, value));
    }
    static SplitConfig all_coherent(std::size_t k) { return uniform(k, 1.0); }
    static SplitConfig all_power(std::size_t k) { return uniform(k, 0.0); }

    bool is_all_coherent() const {
        return std::all_of(rho.begin(), rho.end(), [](double v) { return v == 1.0; });
    }
    bool is_all_power() const {
        return std::all_of(rho.begin(), rho.end(), [](double v) { return v == 0.0; });
    }
};

struct LinkBudget {
    double power;      // received signal power P
    double sigma1_sq;  // CD branch noise variance
    double sigma2_sq;  // PD branch noise variance, after conversion scaling
    double eta = 1.0;  // recorded conversion efficiency; already folded in

    LinkBudget(double p, double s1sq, double s2sq, double eta_ = 1.0)
        : power(p), sigma1_sq(s1sq), sigma2_sq(s2sq), eta(eta_) {
        if (!(power > 0.0) || !(sigma1_sq > 0.0) || !(sigma2_sq > 0.0) || !(eta > 0.0))
            throw std::invalid_argument("LinkBudget: all parameters must be positive");
    }

    // Builds a budget from the raw rectifier noise variance; the equivalent
    // post-scaling noise is N = N'/eta, so its variance is raw/eta^2.
    static LinkBudget from_raw_pd_noise(double p, double s1sq, double raw_s2sq,
                                        double eta) {
        return LinkBudget(p, s1sq, raw_s2sq / (eta * eta), eta);
    }

    double sigma1() const { return std::sqrt(sigma1_sq); }
    double sigma2() const { return std::sqrt(sigma2_sq); }
};

struct ThetaPair {
    double theta1;  // sum rho_k |h_k|^2
    double theta2;  // sum (1 - rho_k)^2 |h_k|^4
};

inline ThetaPair compute_theta(const ChannelRealization& ch, const SplitConfig& cfg) {
    if (ch.gains.size() != cfg.rho.size())
        throw std::invalid_argument(
            "compute_theta: channel has " + std::to_string(ch.gains.size()) +
            " antennas but split config has " + std::to_string(cfg.rho.size()));
    double t1 = 0.0;
    double t2 = 0.0;
    for (std::size_t k = 0; k < cfg.rho.size(); ++k) {
        const double p = std::norm(ch.gains[k]);
        t1 += cfg.rho[k] * p;
        const double u = 1.0 - cfg.rho[k];
        t2 += u * u * p * p;
    }
    return {t1, t2};
}

struct OperatingSnr {
    double coherent;     // H2 P / sigma1^2
    double power_det;    // sqrt(H4) P / sigma2
    double snr;          // min of the two
};

inline OperatingSnr operating_snr(const ChannelRealization& ch, const LinkBudget& lb) {
    const double cd = ch.h2 * lb.power / lb.sigma1_sq;
    const double pd = std::sqrt(ch.h4) * lb.power / lb.sigma2();
    return {cd, pd, std::min(cd, pd)};
}

struct SplitSample {
    std::complex<double> y1;  // combined coherent observation
    double y2;                // combined power observation
    std::complex<double> x;   // transmitted symbol that produced it
};

inline SplitSample sample_splitting_channel(const ThetaPair& theta, const LinkBudget& lb,
                                            std::complex<double> x, Rng& rng) {
    const std::complex<double> z = rng.complex_normal(lb.sigma1_sq);
    const double n = rng.normal(0.0, lb.sigma2());
    const std::complex<double> y1 =
        std::sqrt(theta.theta1) * std::sqrt(lb.power) * x + z;
    const double y2 = std::sqrt(theta.theta2) * lb.power * std::norm(x) + n;
    return {y1, y2, x};
}

inline SplitSample sample_splitting_channel(const ChannelRealization& ch,
                                            const SplitConfig& cfg, const LinkBudget& lb,
                                            std::complex<double> x,
                                            std::uint64_t noise_seed) {
    Rng rng(noise_seed);
    return sample_splitting_channel(compute_theta(ch, cfg), lb, x, rng);
}

inline void to_json(nlohmann::json& j, const ChannelRealization& ch) {
    auto arr = nlohmann::json::array();
    for (const auto& h : ch.gains) arr.push_back({h.real(), h.imag()});
    j = nlohmann::json{{"gains", std::move(arr)}};
}

inline void from_json(const nlohmann::json& j, ChannelRealization& ch) {
    std::vector<std::complex<double>> g;
    for (const auto& pair : j.at("gains"))
        g.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    ch = ChannelRealization(std::move(g));
}

}  // namespace splitrx
