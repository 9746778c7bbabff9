#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "splitrx/modem.hpp"
#include "splitrx/rng.hpp"

using namespace splitrx;

namespace {

const ChannelRealization unit_channel = ChannelRealization::identical(1, 1.0);

// membership in decision region i per the half-space system
bool in_region(const ReceivedConstellation& rc, std::size_t i,
               const std::array<double, 3>& v) {
    for (const auto& h : decision_region(rc, i)) {
        const double lhs = h.ax * v[0] + h.ay * v[1] + h.az * v[2];
        if (lhs > h.b + 1e-9 * (std::fabs(h.b) + 1.0)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("constellation generation: PAM") {
    const auto c = make_constellation(Scheme::PAM, 4);
    REQUIRE(c.symbols.size() == 4);
    CHECK(c.symbols[0][0] == 1.0);
    CHECK(c.symbols[1][0] == 3.0);
    CHECK(c.symbols[2][0] == -1.0);
    CHECK(c.symbols[3][0] == -3.0);
    for (const auto& s : c.symbols) CHECK(s[1] == 0.0);
    CHECK(c.k1 == doctest::Approx(std::sqrt(0.2)).epsilon(1e-15));
    CHECK(c.k1 == doctest::Approx(0.4472).epsilon(1e-4));
}

TEST_CASE("constellation generation: QAM") {
    const auto c = make_constellation(Scheme::QAM, 16);
    REQUIRE(c.symbols.size() == 16);
    CHECK(c.k1 == doctest::Approx(std::sqrt(0.1)).epsilon(1e-15));
    CHECK(c.k1 == doctest::Approx(0.3162).epsilon(1e-4));
    int per_quadrant = 0;
    std::set<std::pair<double, double>> uniq;
    for (const auto& s : c.symbols) {
        CHECK(std::fabs(std::remainder(s[0], 2.0)) == doctest::Approx(1.0));
        CHECK(std::fabs(std::remainder(s[1], 2.0)) == doctest::Approx(1.0));
        if (s[0] > 0 && s[1] > 0) ++per_quadrant;
        uniq.insert({s[0], s[1]});
    }
    CHECK(per_quadrant == 4);
    CHECK(uniq.size() == 16);
}

TEST_CASE("constellation generation: IM") {
    const auto c = make_constellation(Scheme::IM, 4);
    REQUIRE(c.symbols.size() == 4);
    CHECK(c.symbols[0][0] == doctest::Approx(0.0));
    CHECK(c.symbols[1][0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(c.symbols[2][0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.symbols[3][0] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
    CHECK(c.k1 == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("constellation validation and unit mean power") {
    CHECK_THROWS_AS(make_constellation(Scheme::PAM, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_constellation(Scheme::QAM, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_constellation(Scheme::QAM, 9), std::invalid_argument);
    CHECK_THROWS_AS(make_constellation(Scheme::IM, 1), std::invalid_argument);

    for (auto [scheme, m] : std::vector<std::pair<Scheme, std::uint32_t>>{
             {Scheme::PAM, 2}, {Scheme::PAM, 4}, {Scheme::PAM, 8}, {Scheme::PAM, 16},
             {Scheme::QAM, 4}, {Scheme::QAM, 16}, {Scheme::QAM, 36}, {Scheme::QAM, 64},
             {Scheme::IM, 2}, {Scheme::IM, 4}, {Scheme::IM, 8}}) {
        const auto c = make_constellation(scheme, m);
        CHECK(constellation_mean_power(c) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("received constellation mapping") {
    const LinkBudget lb(10.0, 1.0, 1.0);

    // rho = 1 collapses the power coordinate
    const auto pam = make_constellation(Scheme::PAM, 4);
    const auto coh = map_received(
        pam, compute_theta(unit_channel, SplitConfig::all_coherent(1)), lb);
    const double s = 0.4472135954999579 * std::sqrt(10.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(coh.points[i][2] == 0.0);
        CHECK(coh.points[i][0] ==
              doctest::Approx(s * pam.symbols[i][0]).epsilon(1e-12));
    }

    // interior rho puts every point on the paraboloid z = (sqrt(T2)/T1)(x^2+y^2)
    const auto qam = make_constellation(Scheme::QAM, 16);
    const auto theta = compute_theta(unit_channel, SplitConfig({0.5}));
    const auto rc = map_received(qam, theta, lb);
    for (const auto& p : rc.points) {
        const double expected =
            std::sqrt(theta.theta2) / theta.theta1 * (p[0] * p[0] + p[1] * p[1]);
        CHECK(p[2] == doctest::Approx(expected).epsilon(1e-9));
    }

    // IM at rho = 0: pure power ladder with spacing 2 k2 sqrt(Theta2) P
    const auto im = make_constellation(Scheme::IM, 4);
    const auto t0 = compute_theta(unit_channel, SplitConfig::all_power(1));
    const auto ladder = map_received(im, t0, lb);
    const double spacing = 2.0 * im.k2 * std::sqrt(t0.theta2) * lb.power;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ladder.points[i][0] == 0.0);
        CHECK(ladder.points[i][2] ==
              doctest::Approx(spacing * 0.5 * 2.0 * i).epsilon(1e-12));
    }
    CHECK(ladder.points[1][2] - ladder.points[0][2] ==
          doctest::Approx(spacing).epsilon(1e-12));
}

TEST_CASE("ml_detect recovers exact points and breaks ties downward") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget lb(10.0, 1.0, 1.0);
    const auto rc =
        map_received(qam, compute_theta(unit_channel, SplitConfig({0.4})), lb);
    for (std::size_t i = 0; i < rc.points.size(); ++i)
        CHECK(ml_detect(rc, rc.points[i]) == i);

    // hand-made symmetric pair: exact tie must pick the lower index
    ReceivedConstellation tie;
    tie.budget = lb;
    tie.theta = ThetaPair{1.0, 1.0};
    tie.points = {{1.0, 0.0, 0.0}, {3.0, 0.0, 0.0}};
    CHECK(ml_detect(tie, {2.0, 0.0, 0.0}) == 0);
}

TEST_CASE("ml_detect agrees with the half-space decision regions") {
    Rng rng(5150);
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget lb(50.0, 2.0, 0.5);
    for (int trial = 0; trial < 3; ++trial) {
        const auto ch = sample_channel_iid_rayleigh(2, derive_seed(60, trial));
        const auto rc = map_received(
            ch.h2 > 0 ? qam : qam,
            compute_theta(ch, SplitConfig({rng.uniform(), rng.uniform()})), lb);
        for (int i = 0; i < 3000; ++i) {
            const std::array<double, 3> v{rng.normal(0.0, 8.0), rng.normal(0.0, 8.0),
                                          rng.normal(20.0, 30.0)};
            const std::size_t det = ml_detect(rc, v);
            CHECK(in_region(rc, det, v));
            std::size_t members = 0;
            for (std::size_t j = 0; j < rc.points.size(); ++j)
                if (in_region(rc, j, v)) ++members;
            CHECK(members == 1);
        }
    }
}

TEST_CASE("ml_detect is invariant under relabeling of constellation indices") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget lb(30.0, 1.0, 1.0);
    const auto rc =
        map_received(qam, compute_theta(unit_channel, SplitConfig({0.45})), lb);
    ReceivedConstellation shuffled = rc;
    std::vector<std::size_t> perm(rc.points.size());
    Rng rng(424242);
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    for (std::size_t i = 0; i < perm.size(); ++i)
        shuffled.points[i] = rc.points[perm[i]];
    for (int t = 0; t < 2000; ++t) {
        const std::array<double, 3> v{rng.normal(0.0, 5.0), rng.normal(0.0, 5.0),
                                      rng.normal(10.0, 10.0)};
        CHECK(perm[ml_detect(shuffled, v)] == ml_detect(rc, v));
    }
}

TEST_CASE("decision-region JSON export") {
    const auto im = make_constellation(Scheme::IM, 4);
    const LinkBudget lb(10.0, 2.0, 1.0);
    const auto theta = compute_theta(unit_channel, SplitConfig({0.5}));
    const auto rc = map_received(im, theta, lb);
    const auto j = decision_regions_json(rc);
    REQUIRE(j.size() == 4);
    for (const auto& region : j) {
        CHECK(region.contains("symbol"));
        CHECK(region["planes"].size() == 3);
    }
    // coefficient spot check against the defining identity for pair (0, 1)
    const auto& h = j[0]["planes"][0];
    CHECK(h["ax"].get<double>() ==
          doctest::Approx((rc.points[1][0] - rc.points[0][0]) / lb.sigma1_sq));
    CHECK(h["az"].get<double>() ==
          doctest::Approx((rc.points[1][2] - rc.points[0][2]) / (2.0 * lb.sigma2_sq)));
}

TEST_CASE("dominant pairs per scheme") {
    CHECK(dominant_pairs(make_constellation(Scheme::PAM, 8)).w == 1);
    CHECK(dominant_pairs(make_constellation(Scheme::QAM, 16)).w == 8);
    CHECK(dominant_pairs(make_constellation(Scheme::QAM, 36)).w == 12);
    CHECK(dominant_pairs(make_constellation(Scheme::IM, 4)).w == 3);
    CHECK(dominant_pairs(make_constellation(Scheme::PAM, 8)).domain ==
          DominantPairs::Domain::iq);
    CHECK(dominant_pairs(make_constellation(Scheme::IM, 4)).domain ==
          DominantPairs::Domain::power);
}

TEST_CASE("high-SNR SER expressions") {
    const LinkBudget lb100(100.0, 1.0, 1.0);

    // 4-PAM at rho = 1/3: (2/M) Q(sqrt(2) x1 / sigma1)
    const auto pam = make_constellation(Scheme::PAM, 4);
    const auto theta_third = compute_theta(unit_channel, SplitConfig({1.0 / 3.0}));
    const double x1 = pam.k1 * std::sqrt(theta_third.theta1 * 100.0);
    CHECK(ser_high_snr(pam, theta_third, lb100) ==
          doctest::Approx(0.5 * q_func(std::numbers::sqrt2 * x1)).epsilon(1e-14));

    // 16-QAM near rho = 1: approaches (4/sqrt(M)) Q(sqrt(3 H2 P/((M-1) sigma1^2)))
    const LinkBudget lb200(200.0, 1.0, 1.0);
    const auto qam = make_constellation(Scheme::QAM, 16);
    const auto near_one = compute_theta(unit_channel, SplitConfig({1.0 - 1e-9}));
    CHECK(ser_high_snr(qam, near_one, lb200) ==
          doctest::Approx(q_func(std::sqrt(40.0))).epsilon(1e-5));
    CHECK(ser_high_snr(qam, near_one, lb200) == doctest::Approx(1.27e-10).epsilon(0.02));

    // 4-IM at rho = 0, P = 30: (2*3/4) Q(10)
    const LinkBudget lb30(30.0, 1.0, 1.0);
    const auto im = make_constellation(Scheme::IM, 4);
    const auto t0 = compute_theta(unit_channel, SplitConfig::all_power(1));
    CHECK(ser_high_snr(im, t0, lb30) ==
          doctest::Approx(1.5 * q_func(10.0)).epsilon(1e-14));

    // boundary ratios are rejected for PAM/QAM
    const auto t1 = compute_theta(unit_channel, SplitConfig::all_coherent(1));
    CHECK_THROWS_AS(ser_high_snr(qam, t1, lb200), std::domain_error);
    CHECK_THROWS_AS(ser_high_snr(pam, t0, lb100), std::domain_error);
    CHECK_THROWS_AS(ser_high_snr(im, t1, lb100), std::domain_error);

    // monotone decreasing in Theta1 at fixed noise
    double prev = 1.0;
    for (double rho : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
        const auto t = compute_theta(unit_channel, SplitConfig({rho}));
        const double v = ser_high_snr(qam, t, lb200);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("asymptotic SER gain identities at the formula level") {
    // PAM: classical / dominant-pair form at rho -> 1 equals exactly M - 1
    const LinkBudget lb(80.0, 1.0, 1.0);
    for (std::uint32_t m : {4u, 8u}) {
        const auto pam = make_constellation(Scheme::PAM, m);
        const auto theta = compute_theta(unit_channel, SplitConfig({1.0 - 1e-12}));
        const double ratio =
            coherent_ser_pam(m, 1.0, lb) / ser_high_snr(pam, theta, lb);
        CHECK(ratio == doctest::Approx(static_cast<double>(m - 1)).epsilon(1e-6));
    }

    // QAM: ratio tends to sqrt(M) - 1 once the squared term is negligible
    const LinkBudget lb500(500.0, 1.0, 1.0);
    for (std::uint32_t m : {16u, 36u}) {
        const auto qam = make_constellation(Scheme::QAM, m);
        const auto theta = compute_theta(unit_channel, SplitConfig({1.0 - 1e-12}));
        const double ratio =
            coherent_ser_qam(m, 1.0, lb500) / ser_high_snr(qam, theta, lb500);
        CHECK(ratio ==
              doctest::Approx(std::sqrt(static_cast<double>(m)) - 1.0).epsilon(1e-6));
    }

    // IM: the approximation is minimized at rho = 0, so the gain is one
    const auto im = make_constellation(Scheme::IM, 4);
    const LinkBudget lb30(30.0, 1.0, 1.0);
    double best = 1e9, best_rho = 1.0;
    for (double rho = 0.0; rho < 0.96; rho += 0.05) {
        const auto t = compute_theta(unit_channel, SplitConfig({rho}));
        const double v = ser_high_snr(im, t, lb30);
        if (v < best) {
            best = v;
            best_rho = rho;
        }
    }
    CHECK(best_rho == 0.0);
}

TEST_CASE("Monte-Carlo SER: separated points at vanishing noise") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget quiet(10.0, 1e-12, 1e-12);
    const auto res =
        ser_monte_carlo(qam, unit_channel, SplitConfig({0.5}), quiet, 20000, 3);
    CHECK(res.errors == 0);
    CHECK(res.ser == 0.0);
    CHECK(res.ci95_halfwidth > 0.0);

    CHECK_THROWS_AS(
        ser_monte_carlo(qam, unit_channel, SplitConfig({0.5}), quiet, 5000, 3),
        std::invalid_argument);
}

TEST_CASE("Monte-Carlo SER matches the classical coherent QAM formula") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget lb(20.0, 1.0, 1.0);
    const auto res = ser_monte_carlo(qam, unit_channel, SplitConfig::all_coherent(1), lb,
                                     1000000, 314);
    const double classical = coherent_ser_qam(16, 1.0, lb);
    CHECK(std::fabs(res.ser - classical) <= 3.0 * res.ci95_halfwidth);
}

TEST_CASE("Monte-Carlo SER at rho = 0 hits the QAM power-tier collision floor") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget lb(50.0, 1.0, 1.0);
    const auto res =
        ser_monte_carlo(qam, unit_channel, SplitConfig::all_power(1), lb, 100000, 55);
    // tiers {2,10,18} with multiplicities {4,8,4}: best case decodes one
    // member of each tier correctly -> SER floor 1 - 3/16
    const double floor = 1.0 - 3.0 / 16.0;
    CHECK(res.ser >= floor - 4.0 * res.ci95_halfwidth);
    CHECK(res.ser == doctest::Approx(floor).epsilon(0.02));
}

TEST_CASE("Monte-Carlo SER is invariant under the power-of-two noise rescaling") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget base(50.0, 1.0, 1.0);
    const LinkBudget scaled(200.0, 4.0, 16.0);  // (P, s1, s2^0.5) -> (4P, 4s1, 16s2)
    const auto a = ser_monte_carlo(qam, unit_channel, SplitConfig({0.35}), base, 200000, 8);
    const auto b =
        ser_monte_carlo(qam, unit_channel, SplitConfig({0.35}), scaled, 200000, 8);
    CHECK(a.errors == b.errors);
}

TEST_CASE("Monte-Carlo SER is worker-count independent") {
    const auto pam = make_constellation(Scheme::PAM, 4);
    const LinkBudget lb(25.0, 1.0, 1.0);
    set_thread_cap(1);
    const auto serial =
        ser_monte_carlo(pam, unit_channel, SplitConfig({0.5}), lb, 600000, 99);
    set_thread_cap(4);
    const auto parallel =
        ser_monte_carlo(pam, unit_channel, SplitConfig({0.5}), lb, 600000, 99);
    set_thread_cap(0);
    CHECK(serial.errors == parallel.errors);
}

TEST_CASE("SER joint processing gain: zero-error runs are flagged") {
    const auto pam = make_constellation(Scheme::PAM, 4);
    const LinkBudget quiet(1000.0, 1e-6, 1e-6);
    std::vector<SplitConfig> grid{SplitConfig::all_power(1), SplitConfig({0.5}),
                                  SplitConfig::all_coherent(1)};
    const auto res = ser_joint_processing_gain(pam, unit_channel, quiet, grid, 20000, 5);
    CHECK(res.needs_more_trials);
    CHECK(std::isnan(res.gain));

    CHECK_THROWS_AS(
        ser_joint_processing_gain(pam, unit_channel, quiet,
                                  {SplitConfig({0.5}), SplitConfig::all_coherent(1)},
                                  20000, 5),
        std::invalid_argument);
}

TEST_CASE("SER joint processing gain with measurable error rates") {
    const auto pam = make_constellation(Scheme::PAM, 4);
    const LinkBudget lb(25.0, 1.0, 1.0);
    std::vector<SplitConfig> grid;
    for (double rho = 0.0; rho <= 1.0001; rho += 0.25)
        grid.push_back(SplitConfig({std::min(rho, 1.0)}));
    const auto res = ser_joint_processing_gain(pam, unit_channel, lb, grid, 100000, 17);
    CHECK_FALSE(res.needs_more_trials);
    CHECK(res.gain >= 1.0);
    CHECK(res.min_grid_ser <= res.min_endpoint_ser);
    CHECK(res.grid_results.size() == grid.size());
}

TEST_CASE("union bound behaves like an upper proxy and orders configurations") {
    const auto qam = make_constellation(Scheme::QAM, 16);
    const LinkBudget lb(20.0, 1.0, 1.0);
    const auto theta = compute_theta(unit_channel, SplitConfig::all_coherent(1));
    const auto rc = map_received(qam, theta, lb);
    const double ub = ser_union_bound(rc);
    const double mc =
        ser_monte_carlo(qam, unit_channel, SplitConfig::all_coherent(1), lb, 200000, 1)
            .ser;
    CHECK(ub >= mc - 0.002);
    CHECK(ub < 3.0 * mc + 0.01);
}
