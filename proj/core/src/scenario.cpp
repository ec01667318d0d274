#include "relcon/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numbers>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "relcon/rng.hpp"
#include "relcon/spectral.hpp"

namespace relcon {

void ReferenceSpec::validate() const {
    require(std::isfinite(sigma) && sigma >= 0.0, "reference: sigma must be >= 0");
    require(std::isfinite(bandwidth) && bandwidth > 0.0, "reference: bandwidth must be > 0");
    require(std::isfinite(dt) && dt > 0.0, "reference: dt must be > 0");
    require(std::isfinite(duration) && duration * bandwidth >= 100.0,
            fmt::format("reference: duration {} s too short for bandwidth {} rad/s (need duration*bandwidth >= 100)",
                        duration, bandwidth));
    require(bandwidth * dt < std::numbers::pi, "reference: bandwidth must lie below the Nyquist frequency");
}

std::size_t ReferenceSpec::samples() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

std::vector<double> generate_reference(const ReferenceSpec& spec) {
    spec.validate();
    const std::size_t n = spec.samples();
    std::vector<double> y(n, 0.0);
    if (spec.sigma == 0.0 || n < 2) {
        return y;
    }
    const double w = spec.bandwidth;
    const TransferFunction butter({w * w}, {1.0, std::sqrt(2.0) * w, w * w});
    const auto noise = CounterRng(spec.seed).normals(n);
    y = simulate_lti(realize(butter), noise, spec.dt);

    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double& v : y) {
        v -= mean;
        ss += v * v;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0)) {
        fail(ErrorKind::Numerical, "generate_reference: filtered noise has zero variance");
    }
    const double scale = spec.sigma / sd;
    for (double& v : y) {
        v *= scale;
    }
    return y;
}

std::string_view to_string(Design d) { return d == Design::Performance ? "performance" : "reliability"; }

Design parse_design(std::string_view name) {
    if (name == "performance") {
        return Design::Performance;
    }
    if (name == "reliability") {
        return Design::Reliability;
    }
    fail(ErrorKind::InvalidArgument, fmt::format("unknown design '{}' (expected performance|reliability)", name));
}

StressDamage stress_damage(std::span<const double> tj, double dt, const DamageModels& models) {
    StressDamage out;
    const auto hist = rainflow(tj, dt);
    out.rainflow = miner_damage(hist, models.lifetime);
    out.cycles = hist.total_weight();
    for (const auto& c : hist.cycles) {
        out.max_delta_t = std::max(out.max_delta_t, c.delta_t);
    }
    const std::size_t seg = std::min(models.psd_segment, tj.size());
    if (seg >= 8) {
        const Psd psd = estimate_psd(tj, dt, seg);
        out.spectral = single_moment_damage(psd, models.sn, static_cast<double>(tj.size()) * dt);
    }
    return out;
}

TrialResult simulate_trial(const ReferenceSpec& spec, const SynthesisResult& design, Design tag,
                           const DamageModels& models, TrialTrajectories& out) {
    require(design.stable, "run_trial: design is not stable");
    out.reference = generate_reference(spec);
    out.current = simulate_lti(realize(design.closed_loop), out.reference, spec.dt);
    out.tj = junction_temperature(out.current, models.loss, models.network, spec.dt);

    TrialResult r;
    r.seed = spec.seed;
    r.design = tag;
    const std::size_t n = out.reference.size();
    double se = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = out.reference[i] - out.current[i];
        se += e * e;
    }
    r.rms_error = n > 0 ? std::sqrt(se / static_cast<double>(n)) : 0.0;
    if (n >= 2) {
        const StressDamage d = stress_damage(out.tj, spec.dt, models);
        r.damage_rainflow = d.rainflow;
        r.damage_spectral = d.spectral;
        r.max_delta_t = d.max_delta_t;
        std::vector<double> sorted = out.tj;
        const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(n / 2);
        std::nth_element(sorted.begin(), mid, sorted.end());
        r.median_tj = *mid;
        if (n % 2 == 0) {
            r.median_tj = 0.5 * (r.median_tj + *std::max_element(sorted.begin(), mid));
        }
    }
    return r;
}

TrialResult run_trial(const ReferenceSpec& spec, const SynthesisResult& design, Design tag,
                      const DamageModels& models) {
    TrialTrajectories scratch;
    return simulate_trial(spec, design, tag, models, scratch);
}

void StudySpec::validate() const {
    require(!bandwidths.empty(), "study: bandwidth list is empty");
    require(trials >= 1, "study: trials must be >= 1");
    for (double b : bandwidths) {
        ReferenceSpec s = base;
        s.bandwidth = b;
        s.validate();
    }
}

StudyTable monte_carlo(const StudySpec& study, const std::array<const SynthesisResult*, 2>& designs,
                       const DamageModels& models) {
    study.validate();
    require(designs[0] != nullptr && designs[1] != nullptr, "monte_carlo: both designs are required");

    const std::size_t nb = study.bandwidths.size();
    const std::size_t cells = nb * study.trials;
    std::vector<std::array<TrialResult, 2>> results(cells);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= cells) {
                return;
            }
            try {
                ReferenceSpec spec = study.base;
                spec.bandwidth = study.bandwidths[c / study.trials];
                spec.seed = derive_seed(study.base.seed, c / study.trials, c % study.trials);
                results[c][0] = run_trial(spec, *designs[0], Design::Performance, models);
                results[c][1] = run_trial(spec, *designs[1], Design::Reliability, models);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(cells);
            }
        }
    };
    std::size_t nthreads = study.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : study.threads;
    nthreads = std::min(nthreads, cells);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    double max_rf = 0.0;
    double max_sp = 0.0;
    for (const auto& r : results) {
        max_rf = std::max(max_rf, r[0].damage_rainflow);
        max_sp = std::max(max_sp, r[0].damage_spectral);
    }
    auto norm = [](double v, double m) { return m > 0.0 ? v / m : 0.0; };
    const double sigma = study.base.sigma;

    StudyTable table;
    table.rows.reserve(2 * cells);
    for (std::size_t c = 0; c < cells; ++c) {
        for (const auto& t : results[c]) {
            StudyRow row;
            row.bandwidth_index = c / study.trials;
            row.bandwidth = study.bandwidths[row.bandwidth_index];
            row.trial = c % study.trials;
            row.design = t.design;
            row.damage_rainflow = t.damage_rainflow;
            row.damage_spectral = t.damage_spectral;
            row.damage_rainflow_norm = norm(t.damage_rainflow, max_rf);
            row.damage_spectral_norm = norm(t.damage_spectral, max_sp);
            row.rms_error_norm = sigma > 0.0 ? t.rms_error / sigma : 0.0;
            row.max_delta_t = t.max_delta_t;
            row.median_tj = t.median_tj;
            row.seed = t.seed;
            table.rows.push_back(row);
        }
    }

    for (std::size_t b = 0; b < nb; ++b) {
        BandwidthSummary s;
        s.bandwidth = study.bandwidths[b];
        for (std::size_t t = 0; t < study.trials; ++t) {
            const auto& p = table.rows[2 * (b * study.trials + t)];
            const auto& r = table.rows[2 * (b * study.trials + t) + 1];
            s.damage_performance += p.damage_rainflow_norm;
            s.damage_reliability += r.damage_rainflow_norm;
            s.error_performance += p.rms_error_norm;
            s.error_reliability += r.rms_error_norm;
        }
        const auto n = static_cast<double>(study.trials);
        s.damage_performance /= n;
        s.damage_reliability /= n;
        s.error_performance /= n;
        s.error_reliability /= n;
        s.damage_ratio = norm(s.damage_reliability, s.damage_performance);
        s.error_ratio = norm(s.error_reliability, s.error_performance);
        table.summary.push_back(s);
    }
    return table;
}

}  // namespace relcon
