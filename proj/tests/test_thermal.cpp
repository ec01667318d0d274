#include <doctest.h>

#include <cmath>
#include <random>

#include "relcon/error.hpp"
#include "relcon/log.hpp"
#include "relcon/thermal.hpp"

using namespace relcon;

TEST_CASE("conduction loss") {
    const LossParams lp;
    CHECK(conduction_loss(0.0, lp) == 0.0);
    CHECK(conduction_loss(40.0, lp) == doctest::Approx(40.0));
    CHECK(conduction_loss(-40.0, lp) == conduction_loss(40.0, lp));
    LossParams sw;
    sw.p_sw = 3.0;
    CHECK(conduction_loss(40.0, sw) == doctest::Approx(43.0));
}

TEST_CASE("small-signal loss gain") {
    LossParams lp;
    CHECK(loss_small_signal_gain(lp) == doctest::Approx(2.0));
    lp.i_op = 80.0;
    CHECK(loss_small_signal_gain(lp) == doctest::Approx(4.0));

    std::vector<std::string> seen;
    set_warning_sink([&](const std::string& m) { seen.push_back(m); });
    lp.i_op = 0.0;
    CHECK(loss_small_signal_gain(lp) == 0.0);
    CHECK(seen.size() == 1);
    set_warning_sink(nullptr);
}

TEST_CASE("thermal transfer function") {
    const auto net = FosterNetwork::defaults();
    CHECK(net.total_resistance() == doctest::Approx(0.5));
    CHECK(thermal_tf(net).dc_gain() == doctest::Approx(0.5));

    // magnitude nonincreasing in frequency
    const auto grid = FrequencyGrid::log_spaced(1e-3, 1e5, 400);
    const auto r = freq_response(thermal_tf(net), grid);
    for (std::size_t i = 1; i < r.size(); ++i) {
        CHECK(std::abs(r[i]) <= std::abs(r[i - 1]) * (1.0 + 1e-12));
    }
}

TEST_CASE("Foster step responses") {
    const double dt = 1e-3;
    FosterNetwork one{{{1.0, 1.0}}, 300.0};
    std::vector<double> p(5001, 1.0);
    const auto t1 = junction_temperature_from_power(p, one, dt);
    for (std::size_t n = 0; n < p.size(); n += 250) {
        const double t = static_cast<double>(n) * dt;
        CHECK(t1[n] - 300.0 == doctest::Approx(1.0 - std::exp(-t)).epsilon(1e-9));
    }

    FosterNetwork two{{{1.0, 0.5}, {1.0, 0.5}}, 300.0};
    const auto t2 = junction_temperature_from_power(p, two, dt);
    for (std::size_t n = 0; n < p.size(); n += 250) {
        const double t = static_cast<double>(n) * dt;
        CHECK(t2[n] - 300.0 == doctest::Approx(2.0 * (1.0 - std::exp(-t / 0.5))).epsilon(1e-9));
    }
}

TEST_CASE("junction temperature examples") {
    const auto net = FosterNetwork::defaults();
    const LossParams lp;
    const double dt = 1e-3;
    std::vector<double> zero(1000, 0.0);
    for (double t : junction_temperature(zero, lp, net, dt)) {
        CHECK(t == net.t_ambient);
    }

    // 10x the slowest time constant
    std::vector<double> i40(10001, 40.0);
    const auto tj = junction_temperature(i40, lp, net, dt);
    CHECK(tj.back() - net.t_ambient == doctest::Approx(20.0).epsilon(1e-3));

    // square wave, period 40 s >> 1 s: settles at both plateaus within 1%
    std::vector<double> sq(80000);
    for (std::size_t n = 0; n < sq.size(); ++n) {
        sq[n] = (n / 20000) % 2 == 0 ? 40.0 : 20.0;
    }
    const auto ts = junction_temperature(sq, lp, net, dt);
    CHECK(ts[19999] - net.t_ambient == doctest::Approx(20.0).epsilon(0.01));
    CHECK(ts[39999] - net.t_ambient == doctest::Approx(5.0).epsilon(0.01));
    CHECK(ts[59999] - net.t_ambient == doctest::Approx(20.0).epsilon(0.01));

    std::vector<double> bad{1.0, INFINITY};
    CHECK_THROWS_AS(junction_temperature(bad, lp, net, dt), Error);
}

TEST_CASE("thermal chain is monotone and superposes") {
    const auto net = FosterNetwork::defaults();
    const LossParams lp;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 30.0);
    std::vector<double> i(4000), big(4000), p1(4000), p2(4000), p12(4000);
    for (std::size_t k = 0; k < i.size(); ++k) {
        i[k] = n(rng);
        big[k] = i[k] * (1.0 + 0.5 * std::abs(std::sin(0.01 * static_cast<double>(k))));
        p1[k] = std::abs(n(rng));
        p2[k] = std::abs(n(rng));
        p12[k] = p1[k] + p2[k];
    }
    const auto a = junction_temperature(i, lp, net, 1e-3);
    const auto b = junction_temperature(big, lp, net, 1e-3);
    for (std::size_t k = 0; k < i.size(); ++k) {
        CHECK(b[k] >= a[k]);
    }
    const auto r1 = junction_temperature_from_power(p1, net, 1e-3);
    const auto r2 = junction_temperature_from_power(p2, net, 1e-3);
    const auto r12 = junction_temperature_from_power(p12, net, 1e-3);
    for (std::size_t k = 0; k < i.size(); ++k) {
        const double lin = (r1[k] - net.t_ambient) + (r2[k] - net.t_ambient);
        CHECK(r12[k] - net.t_ambient == doctest::Approx(lin).epsilon(1e-9));
    }
}

TEST_CASE("network validation") {
    FosterNetwork empty{{}, 300.0};
    CHECK_THROWS_AS(empty.validate(), Error);
    FosterNetwork neg{{{-1.0, 1.0}}, 300.0};
    CHECK_THROWS_AS(neg.validate(), Error);
    FosterNetwork cold{{{1.0, 1.0}}, 0.0};
    CHECK_THROWS_AS(cold.validate(), Error);
}
