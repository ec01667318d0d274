#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relcon/plant.hpp"
#include "relcon/rng.hpp"
#include "relcon/scenario.hpp"
#include "relcon/spectral.hpp"

using namespace relcon;

namespace {

struct Designs {
    SynthesisResult perf;
    SynthesisResult rel;
};

const Designs& designs() {
    static const Designs d = [] {
        const auto p = decoupled_plant(PlantParams{});
        return Designs{synthesize(p, SensitivityBound::performance()), synthesize(p, SensitivityBound::reliability())};
    }();
    return d;
}

DamageModels models() {
    DamageModels m;
    m.sn = calibrate_sn(m.lifetime, 5.0);
    return m;
}

ReferenceSpec short_spec(double bw, std::uint64_t seed) {
    return ReferenceSpec{40.0, bw, 600.0, 1e-3, seed};
}

}  // namespace

TEST_CASE("reference normalization and determinism") {
    const ReferenceSpec spec{25.0, 10.0, 60.0, 1e-3, 99};
    const auto r = generate_reference(spec);
    REQUIRE(r.size() == spec.samples());
    const double n = static_cast<double>(r.size());
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
    double var = 0.0;
    for (double v : r) {
        var += (v - mean) * (v - mean);
    }
    CHECK(std::abs(mean) < 1e-12 * spec.sigma);
    CHECK(std::sqrt(var / n) == doctest::Approx(spec.sigma).epsilon(1e-12));
    CHECK(generate_reference(spec) == r);

    ReferenceSpec other = spec;
    other.seed = 100;
    CHECK(generate_reference(other) != r);

    ReferenceSpec zero = spec;
    zero.sigma = 0.0;
    for (double v : generate_reference(zero)) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("reference spec invariants") {
    ReferenceSpec s{40.0, 10.0, 5.0, 1e-3, 1};  // 50 radians of the cutoff
    CHECK_THROWS_AS(s.validate(), Error);
    s.duration = 10.0;
    CHECK_NOTHROW(s.validate());
    s.sigma = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = {40.0, 0.0, 10.0, 1e-3, 1};
    CHECK_THROWS_AS(s.validate(), Error);
    s = {40.0, 10.0, 10.0, 0.0, 1};
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("reference -3 dB point") {
    for (double bw : {5.0, 20.0}) {
        const ReferenceSpec spec{1.0, bw, 2000.0, 1e-3, 7};
        const auto r = generate_reference(spec);
        const auto psd = estimate_psd(r, spec.dt, 1 << 16);
        double level = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < psd.grid.size() && psd.grid[i] < 0.2 * bw; ++i) {
            level += psd.values[i];
            ++count;
        }
        level /= count;
        // first frequency where a 9-bin running mean falls below half the passband level
        double corner = 0.0;
        for (std::size_t i = 4; i + 4 < psd.grid.size(); ++i) {
            double m = 0.0;
            for (std::size_t j = i - 4; j <= i + 4; ++j) {
                m += psd.values[j];
            }
            if (m / 9.0 < 0.5 * level) {
                corner = psd.grid[i];
                break;
            }
        }
        MESSAGE("bandwidth " << bw << " estimated corner " << corner);
        CHECK(corner == doctest::Approx(bw).epsilon(0.2));
    }
}

TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
    CHECK(derive_seed(1, 0, 1) != derive_seed(1, 1, 0));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    const CounterRng rng(5);
    CHECK(rng.normal(10) == CounterRng(5).normal(10));
    const auto xs = rng.normals(200'000);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 200'000.0;
    double var = 0.0;
    for (double v : xs) {
        var += (v - mean) * (v - mean);
    }
    CHECK(std::abs(mean) < 0.01);
    CHECK(var / 200'000.0 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("zero reference gives zero damage") {
    const auto& d = designs();
    ReferenceSpec spec = short_spec(5.0, 3);
    spec.sigma = 0.0;
    TrialTrajectories traj;
    const auto r = simulate_trial(spec, d.perf, Design::Performance, models(), traj);
    CHECK(r.rms_error == 0.0);
    CHECK(r.damage_rainflow == 0.0);
    CHECK(r.damage_spectral == 0.0);
    CHECK(r.median_tj == FosterNetwork::defaults().t_ambient);
    const double amb = FosterNetwork::defaults().t_ambient;
    CHECK(std::all_of(traj.tj.begin(), traj.tj.end(), [amb](double t) { return t == amb; }));
}

TEST_CASE("reliability design at 5 rad/s") {
    const auto& d = designs();
    const auto m = models();
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const auto spec = short_spec(5.0, seed);
        const auto p = run_trial(spec, d.perf, Design::Performance, m);
        const auto r = run_trial(spec, d.rel, Design::Reliability, m);
        CHECK(r.damage_rainflow < p.damage_rainflow);
        CHECK(r.rms_error >= p.rms_error);
        CHECK(p.seed == seed);
        CHECK(r.design == Design::Reliability);
        CHECK(p.max_delta_t > 0.0);
        CHECK(p.median_tj > FosterNetwork::defaults().t_ambient);
    }
}

TEST_CASE("damage grows with sigma") {
    const auto& d = designs();
    const auto m = models();
    auto spec = short_spec(5.0, 21);
    spec.duration = 120.0;
    double prev = 0.0;
    for (double sigma : {5.0, 10.0, 20.0, 40.0}) {
        spec.sigma = sigma;
        const double dmg = run_trial(spec, d.perf, Design::Performance, m).damage_rainflow;
        CHECK(dmg > prev);
        prev = dmg;
    }
}

TEST_CASE("Monte Carlo table") {
    const auto& d = designs();
    const auto m = models();
    StudySpec study;
    study.bandwidths = {2.0, 5.0};
    study.trials = 2;
    study.base.duration = 100.0;
    study.threads = 1;
    const auto t = monte_carlo(study, {&d.perf, &d.rel}, m);
    REQUIRE(t.rows.size() == 8);
    REQUIRE(t.summary.size() == 2);

    double max_perf = 0.0, max_perf_spec = 0.0;
    for (const auto& r : t.rows) {
        if (r.design == Design::Performance) {
            max_perf = std::max(max_perf, r.damage_rainflow_norm);
            max_perf_spec = std::max(max_perf_spec, r.damage_spectral_norm);
        }
        CHECK(r.seed == derive_seed(study.base.seed, r.bandwidth_index, r.trial));
    }
    CHECK(max_perf == 1.0);
    CHECK(max_perf_spec == 1.0);
    // ordering (bandwidth, trial, design)
    CHECK(t.rows[0].bandwidth == 2.0);
    CHECK(t.rows[0].design == Design::Performance);
    CHECK(t.rows[1].design == Design::Reliability);
    CHECK(t.rows[2].trial == 1);
    CHECK(t.rows[4].bandwidth == 5.0);

    // parallel run is identical
    StudySpec par = study;
    par.threads = 3;
    const auto tp = monte_carlo(par, {&d.perf, &d.rel}, m);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(tp.rows[i].damage_rainflow == t.rows[i].damage_rainflow);
        CHECK(tp.rows[i].damage_spectral == t.rows[i].damage_spectral);
        CHECK(tp.rows[i].rms_error_norm == t.rows[i].rms_error_norm);
    }

    // more trials keep the raw numbers of the existing ones
    StudySpec more = study;
    more.trials = 4;
    const auto tm = monte_carlo(more, {&d.perf, &d.rel}, m);
    REQUIRE(tm.rows.size() == 16);
    for (const auto& r : t.rows) {
        const auto& q = tm.rows[r.bandwidth_index * 8 + r.trial * 2 + (r.design == Design::Reliability ? 1 : 0)];
        CHECK(q.seed == r.seed);
        CHECK(q.damage_rainflow == r.damage_rainflow);
        CHECK(q.rms_error_norm == r.rms_error_norm);
    }

    StudySpec one = study;
    one.bandwidths = {5.0};
    one.trials = 1;
    CHECK(monte_carlo(one, {&d.perf, &d.rel}, m).rows.size() == 2);

    StudySpec none = study;
    none.trials = 0;
    CHECK_THROWS_AS(monte_carlo(none, {&d.perf, &d.rel}, m), Error);
}
