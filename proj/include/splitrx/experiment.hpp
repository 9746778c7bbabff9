#pragma once

// Experiment runner: named parameter sweeps with a single JSON schema, CSV
// output written in grid order, a JSON summary per run, and a catalog of
// built-in sweeps (fig4..fig16) reproducing the reference result set at desk
// scale. All randomness derives from the spec-level seed, so re-runs are
// byte-identical regardless of worker count.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitrx/channel.hpp"
#include "splitrx/mi.hpp"
#include "splitrx/modem.hpp"
#include "splitrx/optimize.hpp"

namespace splitrx {

struct ExperimentSpec {
    std::string name;
    std::string kind;
    std::string figure;       // which reference figure the sweep mirrors
    std::string description;
    std::uint64_t seed = 42;
    std::string output;       // CSV filename, relative to the output directory
    double runtime_budget_s = 60.0;  // declared desk-scale budget
    nlohmann::json params;
};

inline void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    j = nlohmann::json{{"name", s.name},     {"kind", s.kind},
                       {"figure", s.figure}, {"description", s.description},
                       {"seed", s.seed},     {"output", s.output},
                       {"runtime_budget_s", s.runtime_budget_s},
                       {"params", s.params}};
}

inline void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    j.at("name").get_to(s.name);
    j.at("kind").get_to(s.kind);
    s.figure = j.value("figure", "");
    s.description = j.value("description", "");
    s.seed = j.value("seed", std::uint64_t{42});
    s.output = j.value("output", s.name + ".csv");
    s.runtime_budget_s = j.value("runtime_budget_s", 60.0);
    s.params = j.value("params", nlohmann::json::object());
}

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fmt_u(std::uint64_t v) { return std::to_string(v); }

struct ParamReader {
    const nlohmann::json& p;
    std::vector<std::string>* problems;

    double num(const std::string& key, bool positive = true) const {
        if (!p.contains(key) || !p[key].is_number()) {
            problems->push_back("params." + key + ": missing or not a number");
            return 1.0;
        }
        const double v = p[key].get<double>();
        if (positive && !(v > 0.0)) {
            problems->push_back("params." + key + ": must be positive");
            return 1.0;
        }
        return v;
    }

    std::uint64_t count(const std::string& key) const {
        const double v = num(key);
        return static_cast<std::uint64_t>(v);
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        if (!p.contains(key) || !p[key].is_array() || p[key].empty()) {
            problems->push_back("params." + key + ": missing or empty array");
            return out;
        }
        for (const auto& v : p[key]) {
            if (!v.is_number()) {
                problems->push_back("params." + key + ": non-numeric entry");
                return out;
            }
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::string str(const std::string& key) const {
        if (!p.contains(key) || !p[key].is_string()) {
            problems->push_back("params." + key + ": missing or not a string");
            return "";
        }
        return p[key].get<std::string>();
    }
};

inline std::vector<double> rho_range(double start, double stop, double step) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double r = start + i * step;
        if (r > stop + 1e-12) break;
        out.push_back(std::min(1.0, std::max(0.0, r)));
    }
    return out;
}

inline ChannelRealization channel_from_params(const nlohmann::json& p,
                                              std::size_t default_k) {
    if (p.contains("channel")) return p["channel"].get<ChannelRealization>();
    std::size_t k = default_k;
    if (p.contains("k")) k = p["k"].get<std::size_t>();
    return ChannelRealization::identical(k, 1.0);
}

}  // namespace detail

// Validates a spec; returns human-readable problems (empty when valid).
inline std::vector<std::string> validate_experiment(const ExperimentSpec& spec) {
    std::vector<std::string> problems;
    if (spec.name.empty()) problems.push_back("name: must not be empty");
    if (spec.output.empty()) problems.push_back("output: must not be empty");
    if (!(spec.runtime_budget_s > 0.0))
        problems.push_back("runtime_budget_s: must be positive");
    detail::ParamReader rd{spec.params, &problems};
    const std::string& k = spec.kind;
    if (k == "mi_vs_rho") {
        rd.num("power");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
        rd.num("rho_step");
        if (rd.count("samples") < 10000)
            problems.push_back("params.samples: must be >= 1e4");
        if (rd.count("bins") < 8) problems.push_back("params.bins: must be >= 8");
    } else if (k == "mi_approx_vs_rho" || k == "opt_rho_vs_power") {
        rd.list("powers");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
        rd.num("rho_step");
        if (rd.count("samples") < 10000)
            problems.push_back("params.samples: must be >= 1e4");
        if (rd.count("bins") < 8) problems.push_back("params.bins: must be >= 8");
    } else if (k == "mi_vs_power") {
        rd.list("powers");
        rd.list("sigma2_sq_list");
        rd.num("sigma1_sq");
    } else if (k == "gain_vs_power") {
        rd.list("powers");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
        rd.num("rho_step");
    } else if (k == "mi_strategies_vs_k") {
        rd.list("k_list");
        rd.num("power");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
        rd.count("realizations");
    } else if (k == "k1_ratio_vs_k") {
        rd.list("k_list");
        rd.count("realizations");
    } else if (k == "ser_vs_rho") {
        rd.str("scheme");
        rd.count("m");
        rd.num("power");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
        rd.num("rho_step");
        if (rd.count("trials") < 10000)
            problems.push_back("params.trials: must be >= 1e4");
    } else if (k == "ser_gain_vs_power") {
        rd.list("m_list");
        rd.list("powers");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
        rd.num("rho_step");
    } else if (k == "k1_vs_k_ser") {
        rd.count("m");
        rd.list("powers");
        rd.list("k_list");
        rd.count("realizations");
        rd.num("sigma1_sq");
        rd.num("sigma2_sq");
    } else {
        problems.push_back("kind: unknown experiment kind '" + k + "'");
    }
    return problems;
}

namespace detail {

struct CsvSink {
    std::string header;
    std::vector<std::string> rows;
};

inline nlohmann::json run_mi_vs_rho(const ExperimentSpec& spec, CsvSink& csv) {
    const LinkBudget lb(spec.params["power"].get<double>(),
                        spec.params["sigma1_sq"].get<double>(),
                        spec.params["sigma2_sq"].get<double>());
    const auto ch = channel_from_params(spec.params, 1);
    const auto rhos = rho_range(spec.params.value("rho_start", 0.0),
                                spec.params.value("rho_stop", 1.0),
                                spec.params["rho_step"].get<double>());
    const auto samples = static_cast<std::uint64_t>(spec.params["samples"].get<double>());
    const auto bins = static_cast<std::uint32_t>(spec.params["bins"].get<double>());
    csv.header = "rho,mi_bits,std_err,samples,bins,seed";
    double best = -1.0;
    double best_rho = 0.0;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const std::uint64_t row_seed = derive_seed(spec.seed, i);
        const auto est = mi_mc_histogram(ch, SplitConfig::uniform(ch.antennas(), rhos[i]),
                                         lb, samples, bins, row_seed);
        csv.rows.push_back(fmt_g(rhos[i]) + "," + fmt_g(est.bits) + "," +
                           fmt_g(est.std_err) + "," + fmt_u(samples) + "," +
                           std::to_string(bins) + "," + fmt_u(row_seed));
        if (est.bits > best) {
            best = est.bits;
            best_rho = rhos[i];
        }
    }
    const double coh = mi_coherent_closed_form(ch, lb);
    const double ncoh = mi_noncoherent_exact(ch, lb);
    return {{"argmax_rho", best_rho},
            {"max_mi_bits", best},
            {"mi_rho1_bits", coh},
            {"mi_rho0_bits", ncoh},
            {"gain_vs_best_endpoint", best / std::max(coh, ncoh)}};
}

inline nlohmann::json run_mi_approx_vs_rho(const ExperimentSpec& spec, CsvSink& csv) {
    const auto ch = channel_from_params(spec.params, 1);
    const double s1 = spec.params["sigma1_sq"].get<double>();
    const double s2 = spec.params["sigma2_sq"].get<double>();
    const double step = spec.params["rho_step"].get<double>();
    const auto samples = static_cast<std::uint64_t>(spec.params["samples"].get<double>());
    const auto bins = static_cast<std::uint32_t>(spec.params["bins"].get<double>());
    csv.header = "power,rho,mi_bits,std_err,samples,bins,seed,mi_approx_ei";
    double worst_gap = 0.0;
    std::size_t row = 0;
    for (double power : spec.params["powers"].get<std::vector<double>>()) {
        const LinkBudget lb(power, s1, s2);
        for (const double rho : rho_range(step, 1.0 - step / 2.0 - 1e-12, step)) {
            const auto cfg = SplitConfig::uniform(ch.antennas(), rho);
            const std::uint64_t row_seed = derive_seed(spec.seed, row++);
            const auto est = mi_mc_histogram(ch, cfg, lb, samples, bins, row_seed);
            const double approx = mi_high_snr_approx(ch, cfg, lb, HighSnrForm::ei);
            worst_gap = std::max(worst_gap, std::fabs(est.bits - approx));
            csv.rows.push_back(fmt_g(power) + "," + fmt_g(rho) + "," + fmt_g(est.bits) +
                               "," + fmt_g(est.std_err) + "," + fmt_u(samples) + "," +
                               std::to_string(bins) + "," + fmt_u(row_seed) + "," +
                               fmt_g(approx));
        }
    }
    return {{"max_abs_gap_bits", worst_gap}};
}

inline nlohmann::json run_opt_rho_vs_power(const ExperimentSpec& spec, CsvSink& csv) {
    const auto ch = channel_from_params(spec.params, 1);
    const double s1 = spec.params["sigma1_sq"].get<double>();
    const double s2 = spec.params["sigma2_sq"].get<double>();
    const double step = spec.params["rho_step"].get<double>();
    const auto samples = static_cast<std::uint64_t>(spec.params["samples"].get<double>());
    const auto bins = static_cast<std::uint32_t>(spec.params["bins"].get<double>());
    csv.header = "power,opt_rho,mi_bits,std_err,samples,bins,seed";
    nlohmann::json opt = nlohmann::json::object();
    std::size_t row = 0;
    for (double power : spec.params["powers"].get<std::vector<double>>()) {
        const LinkBudget lb(power, s1, s2);
        double best = mi_coherent_closed_form(ch, lb);
        double best_rho = 1.0;
        double best_se = 0.0;
        std::uint64_t best_seed = 0;
        const double ncoh = mi_noncoherent_exact(ch, lb);
        if (ncoh > best) {
            best = ncoh;
            best_rho = 0.0;
        }
        for (const double rho : rho_range(step, 1.0 - step / 2.0 - 1e-12, step)) {
            const std::uint64_t row_seed = derive_seed(spec.seed, row++);
            const auto est = mi_mc_histogram(
                ch, SplitConfig::uniform(ch.antennas(), rho), lb, samples, bins, row_seed);
            if (est.bits > best) {
                best = est.bits;
                best_rho = rho;
                best_se = est.std_err;
                best_seed = row_seed;
            }
        }
        csv.rows.push_back(fmt_g(power) + "," + fmt_g(best_rho) + "," + fmt_g(best) + "," +
                           fmt_g(best_se) + "," + fmt_u(samples) + "," +
                           std::to_string(bins) + "," + fmt_u(best_seed));
        opt[fmt_g(power)] = best_rho;
    }
    return {{"opt_rho_by_power", opt}};
}

inline nlohmann::json run_mi_vs_power(const ExperimentSpec& spec, CsvSink& csv) {
    const auto ch = channel_from_params(spec.params, 1);
    const double s1 = spec.params["sigma1_sq"].get<double>();
    csv.header =
        "sigma2_sq,power,mi_split_rho_third,mi_coherent,mi_noncoherent_lb,"
        "mi_noncoherent_exact";
    for (double s2 : spec.params["sigma2_sq_list"].get<std::vector<double>>()) {
        for (double power : spec.params["powers"].get<std::vector<double>>()) {
            const LinkBudget lb(power, s1, s2);
            const auto cfg = SplitConfig::uniform(ch.antennas(), 1.0 / 3.0);
            csv.rows.push_back(
                fmt_g(s2) + "," + fmt_g(power) + "," +
                fmt_g(mi_high_snr_approx(ch, cfg, lb, HighSnrForm::ei)) + "," +
                fmt_g(mi_coherent_closed_form(ch, lb)) + "," +
                fmt_g(mi_noncoherent_lower_bound(ch, lb)) + "," +
                fmt_g(mi_noncoherent_exact(ch, lb)));
        }
    }
    return {{"rows", csv.rows.size()}};
}

inline nlohmann::json run_gain_vs_power(const ExperimentSpec& spec, CsvSink& csv) {
    const auto ch = channel_from_params(spec.params, 1);
    const double s1 = spec.params["sigma1_sq"].get<double>();
    const double s2 = spec.params["sigma2_sq"].get<double>();
    const double step = spec.params["rho_step"].get<double>();
    csv.header = "power,gain,argmax_rho,best_bits,coherent_bits,noncoherent_lb_bits";
    const auto grid = uniform_rho_grid(ch.antennas(), step);
    double last_gain = 0.0;
    for (double power : spec.params["powers"].get<std::vector<double>>()) {
        const LinkBudget lb(power, s1, s2);
        const auto res = joint_processing_gain_mi(ch, lb, grid, [&](const SplitConfig& c) {
            return mi_high_snr_approx(ch, c, lb, HighSnrForm::ei);
        });
        csv.rows.push_back(fmt_g(power) + "," + fmt_g(res.gain) + "," +
                           fmt_g(res.argmax.rho[0]) + "," + fmt_g(res.best_bits) + "," +
                           fmt_g(res.coherent_bits) + "," + fmt_g(res.noncoherent_bits));
        last_gain = res.gain;
    }
    return {{"gain_at_max_power", last_gain}};
}

inline nlohmann::json run_mi_strategies_vs_k(const ExperimentSpec& spec, CsvSink& csv) {
    const double power = spec.params["power"].get<double>();
    const double s1 = spec.params["sigma1_sq"].get<double>();
    const double s2 = spec.params["sigma2_sq"].get<double>();
    const LinkBudget lb(power, s1, s2);
    const auto realizations = static_cast<std::uint64_t>(
        spec.params["realizations"].get<double>());
    csv.header = "k,strategy,mean_mi_bits,realizations,power";
    nlohmann::json means = nlohmann::json::object();
    for (double kd : spec.params["k_list"].get<std::vector<double>>()) {
        const auto k = static_cast<std::size_t>(kd);
        double acc_opt = 0.0, acc_simpl = 0.0, acc_third = 0.0;
        for (std::uint64_t r = 0; r < realizations; ++r) {
            const auto ch = sample_channel_iid_rayleigh(
                k, derive_seed(spec.seed, (k << 32) + r));
            P1Options opts;
            opts.seed = derive_seed(spec.seed, (k << 40) + r);
            const auto sol = solve_p1(ch, opts);
            acc_opt += mi_high_snr_approx(compute_theta(ch, sol.rho), lb,
                                          HighSnrForm::log);
            if (k >= 2) {
                const auto part = best_simplified_partition(ch);
                ThetaPair theta{0.0, 0.0};
                for (std::size_t i = 0; i < k; ++i) {
                    const double g = std::norm(ch.gains[part.order[i]]);
                    if (i < part.k1)
                        theta.theta1 += g;
                    else
                        theta.theta2 += g * g;
                }
                acc_simpl += mi_high_snr_approx(theta, lb, HighSnrForm::log);
            }
            acc_third += mi_high_snr_approx(ch, SplitConfig::uniform(k, 1.0 / 3.0), lb,
                                            HighSnrForm::log);
        }
        const double rn = static_cast<double>(realizations);
        csv.rows.push_back(fmt_u(k) + ",optimal," + fmt_g(acc_opt / rn) + "," +
                           fmt_u(realizations) + "," + fmt_g(power));
        if (k >= 2)
            csv.rows.push_back(fmt_u(k) + ",simplified," + fmt_g(acc_simpl / rn) + "," +
                               fmt_u(realizations) + "," + fmt_g(power));
        csv.rows.push_back(fmt_u(k) + ",uniform_third," + fmt_g(acc_third / rn) + "," +
                           fmt_u(realizations) + "," + fmt_g(power));
        means[std::to_string(k)] = {{"optimal", acc_opt / rn},
                                    {"uniform_third", acc_third / rn}};
    }
    return {{"mean_mi_by_k", means}};
}

inline nlohmann::json run_k1_ratio_vs_k(const ExperimentSpec& spec, CsvSink& csv) {
    const auto realizations = static_cast<std::uint64_t>(
        spec.params["realizations"].get<double>());
    csv.header = "k,mean_ratio,std_ratio,realizations";
    nlohmann::json means = nlohmann::json::object();
    for (double kd : spec.params["k_list"].get<std::vector<double>>()) {
        const auto k = static_cast<std::size_t>(kd);
        double acc = 0.0, acc2 = 0.0;
        for (std::uint64_t r = 0; r < realizations; ++r) {
            const auto ch = sample_channel_iid_rayleigh(
                k, derive_seed(spec.seed, (k << 32) + r));
            const auto part = best_simplified_partition(ch);
            const double ratio = static_cast<double>(part.k1) / static_cast<double>(k);
            acc += ratio;
            acc2 += ratio * ratio;
        }
        const double rn = static_cast<double>(realizations);
        const double mean = acc / rn;
        const double sd = std::sqrt(std::max(acc2 / rn - mean * mean, 0.0));
        csv.rows.push_back(fmt_u(k) + "," + fmt_g(mean) + "," + fmt_g(sd) + "," +
                           fmt_u(realizations));
        means[std::to_string(k)] = mean;
    }
    return {{"mean_ratio_by_k", means}};
}

inline nlohmann::json run_ser_vs_rho(const ExperimentSpec& spec, CsvSink& csv) {
    const auto scheme = scheme_from_name(spec.params["scheme"].get<std::string>());
    const auto m = static_cast<std::uint32_t>(spec.params["m"].get<double>());
    const auto c = make_constellation(scheme, m);
    const auto ch = channel_from_params(spec.params, 1);
    const LinkBudget lb(spec.params["power"].get<double>(),
                        spec.params["sigma1_sq"].get<double>(),
                        spec.params["sigma2_sq"].get<double>());
    const double step = spec.params["rho_step"].get<double>();
    const auto trials = static_cast<std::uint64_t>(spec.params["trials"].get<double>());
    csv.header = "scheme,M,rho,P,sigma1_sq,sigma2_sq,trials,errors,ser,ci95,approx_ser";
    double min_ser = 2.0;
    double argmin_rho = 0.0;
    const auto rhos = rho_range(0.0, 1.0, step);
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const auto cfg = SplitConfig::uniform(ch.antennas(), rhos[i]);
        const auto theta = compute_theta(ch, cfg);
        const auto res = ser_monte_carlo(c, ch, cfg, lb, trials, derive_seed(spec.seed, i));
        double approx = std::numeric_limits<double>::quiet_NaN();
        if (theta.theta2 > 0.0 && (scheme == Scheme::IM || theta.theta1 > 0.0))
            approx = ser_high_snr(c, theta, lb);
        csv.rows.push_back(std::string(scheme_name(scheme)) + "," + fmt_u(m) + "," +
                           fmt_g(rhos[i]) + "," + fmt_g(lb.power) + "," +
                           fmt_g(lb.sigma1_sq) + "," + fmt_g(lb.sigma2_sq) + "," +
                           fmt_u(trials) + "," + fmt_u(res.errors) + "," +
                           fmt_g(res.ser) + "," + fmt_g(res.ci95_halfwidth) + "," +
                           fmt_g(approx));
        if (res.ser < min_ser) {
            min_ser = res.ser;
            argmin_rho = rhos[i];
        }
    }
    return {{"argmin_rho", argmin_rho}, {"min_ser", min_ser}};
}

inline nlohmann::json run_ser_gain_vs_power(const ExperimentSpec& spec, CsvSink& csv) {
    const auto ch = channel_from_params(spec.params, 1);
    const double s1 = spec.params["sigma1_sq"].get<double>();
    const double s2 = spec.params["sigma2_sq"].get<double>();
    const double step = spec.params["rho_step"].get<double>();
    csv.header = "scheme,m,power,sigma2_sq,gain_ub,argmin_rho";
    nlohmann::json gains = nlohmann::json::object();
    for (double md : spec.params["m_list"].get<std::vector<double>>()) {
        const auto m = static_cast<std::uint32_t>(md);
        const auto c = make_constellation(Scheme::QAM, m);
        for (double power : spec.params["powers"].get<std::vector<double>>()) {
            const LinkBudget lb(power, s1, s2);
            double min_all = std::numeric_limits<double>::infinity();
            double min_end = std::numeric_limits<double>::infinity();
            double argmin = 0.0;
            for (const double rho : rho_range(0.0, 1.0, step)) {
                const auto theta =
                    compute_theta(ch, SplitConfig::uniform(ch.antennas(), rho));
                const double ub = ser_union_bound(map_received(c, theta, lb));
                if (ub < min_all) {
                    min_all = ub;
                    argmin = rho;
                }
                if (rho == 0.0 || rho == 1.0) min_end = std::min(min_end, ub);
            }
            const double gain = min_end / min_all;
            csv.rows.push_back("qam," + fmt_u(m) + "," + fmt_g(power) + "," + fmt_g(s2) +
                               "," + fmt_g(gain) + "," + fmt_g(argmin));
            gains[fmt_u(m) + "@" + fmt_g(power)] = gain;
        }
    }
    return {{"gain_by_m_power", gains}};
}

inline nlohmann::json run_k1_vs_k_ser(const ExperimentSpec& spec, CsvSink& csv) {
    const auto m = static_cast<std::uint32_t>(spec.params["m"].get<double>());
    const auto c = make_constellation(Scheme::QAM, m);
    const double s1 = spec.params["sigma1_sq"].get<double>();
    const double s2 = spec.params["sigma2_sq"].get<double>();
    const auto realizations = static_cast<std::uint64_t>(
        spec.params["realizations"].get<double>());
    csv.header = "power,k,mean_k1_star,mean_ratio,realizations";
    nlohmann::json means = nlohmann::json::object();
    for (double power : spec.params["powers"].get<std::vector<double>>()) {
        const LinkBudget lb(power, s1, s2);
        for (double kd : spec.params["k_list"].get<std::vector<double>>()) {
            const auto k = static_cast<std::size_t>(kd);
            if (k < 2) continue;
            double acc = 0.0;
            for (std::uint64_t r = 0; r < realizations; ++r) {
                const auto ch = sample_channel_iid_rayleigh(
                    k, derive_seed(spec.seed, (k << 32) + r));
                std::size_t best_k1 = 1;
                double best_ser = std::numeric_limits<double>::infinity();
                for (std::size_t k1 = 1; k1 < k; ++k1) {
                    std::vector<double> rho(k, 0.0);
                    for (std::size_t i = 0; i < k1; ++i) rho[i] = 1.0;
                    const auto theta = compute_theta(ch, SplitConfig(rho));
                    const double ub = ser_union_bound(map_received(c, theta, lb));
                    if (ub < best_ser) {
                        best_ser = ub;
                        best_k1 = k1;
                    }
                }
                acc += static_cast<double>(best_k1);
            }
            const double mean = acc / static_cast<double>(realizations);
            csv.rows.push_back(fmt_g(power) + "," + fmt_u(k) + "," + fmt_g(mean) + "," +
                               fmt_g(mean / static_cast<double>(k)) + "," +
                               fmt_u(realizations));
            means[fmt_g(power) + "@" + std::to_string(k)] = mean;
        }
    }
    return {{"mean_k1_by_power_k", means}};
}

}  // namespace detail

// Runs a validated spec: writes <out_dir>/<output> (CSV, rows in grid order)
// and <out_dir>/<name>_summary.json; returns the summary.
inline nlohmann::json run_experiment(const ExperimentSpec& spec,
                                     const std::string& out_dir = ".") {
    if (const auto problems = validate_experiment(spec); !problems.empty()) {
        std::string msg = "invalid experiment spec '" + spec.name + "':";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw std::invalid_argument(msg);
    }
    detail::CsvSink csv;
    nlohmann::json summary;
    if (spec.kind == "mi_vs_rho") summary = detail::run_mi_vs_rho(spec, csv);
    else if (spec.kind == "mi_approx_vs_rho") summary = detail::run_mi_approx_vs_rho(spec, csv);
    else if (spec.kind == "opt_rho_vs_power") summary = detail::run_opt_rho_vs_power(spec, csv);
    else if (spec.kind == "mi_vs_power") summary = detail::run_mi_vs_power(spec, csv);
    else if (spec.kind == "gain_vs_power") summary = detail::run_gain_vs_power(spec, csv);
    else if (spec.kind == "mi_strategies_vs_k") summary = detail::run_mi_strategies_vs_k(spec, csv);
    else if (spec.kind == "k1_ratio_vs_k") summary = detail::run_k1_ratio_vs_k(spec, csv);
    else if (spec.kind == "ser_vs_rho") summary = detail::run_ser_vs_rho(spec, csv);
    else if (spec.kind == "ser_gain_vs_power") summary = detail::run_ser_gain_vs_power(spec, csv);
    else summary = detail::run_k1_vs_k_ser(spec, csv);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path csv_path = fs::path(out_dir) / spec.output;
    {
        std::ofstream out(csv_path);
        out << csv.header << "\n";
        for (const auto& row : csv.rows) out << row << "\n";
        out.flush();
        if (!out)
            throw std::runtime_error("run_experiment: cannot write " + csv_path.string());
    }
    summary["name"] = spec.name;
    summary["kind"] = spec.kind;
    summary["figure"] = spec.figure;
    summary["seed"] = spec.seed;
    summary["rows"] = csv.rows.size();
    summary["csv"] = csv_path.string();
    const fs::path sum_path = fs::path(out_dir) / (spec.name + "_summary.json");
    {
        std::ofstream out(sum_path);
        out << summary.dump(2) << "\n";
        if (!out)
            throw std::runtime_error("run_experiment: cannot write " + sum_path.string());
    }
    return summary;
}

// Built-in sweep catalog mirroring the reference figures at desk scale.
inline const std::vector<ExperimentSpec>& list_experiments() {
    static const std::vector<ExperimentSpec> catalog = [] {
        std::vector<ExperimentSpec> v;
        const auto add = [&](std::string name, std::string kind, std::string figure,
                             std::string desc, double budget, nlohmann::json params) {
            ExperimentSpec s;
            s.name = std::move(name);
            s.kind = std::move(kind);
            s.figure = std::move(figure);
            s.description = std::move(desc);
            s.seed = 42;
            s.output = s.name + ".csv";
            s.runtime_budget_s = budget;
            s.params = std::move(params);
            v.push_back(std::move(s));
        };
        add("fig4", "mi_vs_rho", "4",
            "Monte-Carlo mutual information vs splitting ratio, P=10, K=1", 120,
            {{"power", 10.0}, {"k", 1}, {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0},
             {"rho_step", 0.01}, {"samples", 1e6}, {"bins", 64}});
        add("fig5", "mi_approx_vs_rho", "5",
            "High-SNR approximation vs Monte-Carlo estimate across the ratio range", 180,
            {{"powers", {10.0, 100.0}}, {"k", 1}, {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0},
             {"rho_step", 0.02}, {"samples", 1e6}, {"bins", 64}});
        add("fig7", "opt_rho_vs_power", "7",
            "Monte-Carlo optimal splitting ratio vs received power (approaches 1/3)", 600,
            {{"powers", {10.0, 20.0, 35.0, 50.0, 100.0, 300.0, 1000.0}}, {"k", 1},
             {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0}, {"rho_step", 0.05},
             {"samples", 4e6}, {"bins", 64}});
        add("fig8", "mi_vs_power", "8",
            "Splitting vs conventional mutual information across power", 60,
            {{"powers", {1.0, 3.162, 10.0, 31.62, 100.0, 316.2, 1000.0, 3162.0, 10000.0}},
             {"k", 1}, {"sigma1_sq", 1.0}, {"sigma2_sq_list", {0.01, 1.0, 100.0}}});
        add("fig9", "gain_vs_power", "9",
            "Joint processing gain in mutual information vs power (formula-based)", 60,
            {{"powers", {10.0, 31.62, 100.0, 316.2, 1000.0, 3162.0, 1e4, 3.162e4, 1e5,
                         3.162e5, 1e6}},
             {"k", 1}, {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0}, {"rho_step", 0.01}});
        add("fig10", "mi_strategies_vs_k", "10",
            "Average rate of optimal / simplified / uniform-1/3 splitting vs antennas",
            180,
            {{"k_list", {2, 3, 4, 6, 8}}, {"realizations", 500}, {"power", 100.0},
             {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0}});
        add("fig11", "k1_ratio_vs_k", "11",
            "Mean optimal coherent-antenna fraction of the simplified receiver", 120,
            {{"k_list", {16, 32, 48, 64, 96}}, {"realizations", 1000}});
        add("fig14", "ser_vs_rho", "14",
            "16-QAM symbol error rate vs splitting ratio at P=200", 300,
            {{"scheme", "qam"}, {"m", 16}, {"k", 1}, {"power", 200.0},
             {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0}, {"rho_step", 0.05},
             {"trials", 1e6}});
        add("fig15", "ser_gain_vs_power", "15",
            "QAM SER joint processing gain vs power (pairwise union-bound proxy; the "
            "exact asymptote needs ~1e9 trials/point)",
            60,
            {{"m_list", {16, 36}}, {"k", 1},
             {"powers", {10.0, 31.62, 100.0, 316.2, 1000.0}}, {"sigma1_sq", 1.0},
             {"sigma2_sq", 1e-3}, {"rho_step", 0.01}});
        add("fig16", "k1_vs_k_ser", "16",
            "Optimal coherent-antenna count for 16-QAM at the simplified receiver "
            "(union-bound scored)",
            120,
            {{"m", 16}, {"powers", {2.0, 200.0}}, {"k_list", {2, 4, 6, 8, 10, 12}},
             {"realizations", 200}, {"sigma1_sq", 1.0}, {"sigma2_sq", 1.0}});
        return v;
    }();
    return catalog;
}

inline const ExperimentSpec& find_experiment(const std::string& name) {
    for (const auto& s : list_experiments())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown built-in experiment: " + name);
}

}  // namespace splitrx
