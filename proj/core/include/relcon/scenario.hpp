#pragma once

// Stochastic reference generation, closed-loop electro-thermal trials and the
// Monte Carlo damage-versus-bandwidth study.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "relcon/fatigue.hpp"
#include "relcon/synthesis.hpp"
#include "relcon/thermal.hpp"

namespace relcon {

struct ReferenceSpec {
    double sigma = 40.0;        // A
    double bandwidth = 10.0;    // rad/s
    double duration = 3600.0;   // s
    double dt = 1e-3;           // s
    std::uint64_t seed = 1;

    /// sigma >= 0, bandwidth > 0, dt > 0 and duration * bandwidth >= 100
    /// (at least 100 radians of the cutoff).
    void validate() const;
    [[nodiscard]] std::size_t samples() const;
};

/// Counter-based Gaussian noise through w^2/(s^2 + sqrt(2) w s + w^2)
/// (ZOH), then shifted and scaled to sample mean 0 and sample std sigma.
std::vector<double> generate_reference(const ReferenceSpec& spec);

enum class Design { Performance, Reliability };

std::string_view to_string(Design d);
Design parse_design(std::string_view name);

struct TrialResult {
    double rms_error = 0.0;        // A
    double damage_rainflow = 0.0;  // Coffin-Manson + Miner
    double damage_spectral = 0.0;  // single-moment, Basquin
    double max_delta_t = 0.0;      // largest counted cycle range (K)
    double median_tj = 0.0;        // K
    std::uint64_t seed = 0;
    Design design = Design::Performance;
};

struct TrialTrajectories {
    std::vector<double> reference;
    std::vector<double> current;
    std::vector<double> tj;
};

struct DamageModels {
    LossParams loss;
    FosterNetwork network = FosterNetwork::defaults();
    LifetimeParams lifetime = LifetimeParams::defaults();
    SnCurve sn;
    std::size_t psd_segment = 1 << 14;  // clipped to the signal length
};

TrialResult run_trial(const ReferenceSpec& spec, const SynthesisResult& design, Design tag,
                      const DamageModels& models);

/// run_trial that also returns the simulated signals.
TrialResult simulate_trial(const ReferenceSpec& spec, const SynthesisResult& design, Design tag,
                           const DamageModels& models, TrialTrajectories& out);

/// Damage numbers of an arbitrary junction-temperature history.
struct StressDamage {
    double rainflow = 0.0;
    double spectral = 0.0;
    double max_delta_t = 0.0;
    double cycles = 0.0;
};
StressDamage stress_damage(std::span<const double> tj, double dt, const DamageModels& models);

struct StudySpec {
    std::vector<double> bandwidths{0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
    std::size_t trials = 20;
    ReferenceSpec base{40.0, 10.0, 600.0, 1e-3, 2024};  // bandwidth and seed are per cell
    std::size_t threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct StudyRow {
    double bandwidth = 0.0;
    std::size_t bandwidth_index = 0;
    std::size_t trial = 0;
    Design design = Design::Performance;
    double damage_rainflow = 0.0;       // raw
    double damage_spectral = 0.0;       // raw
    double damage_rainflow_norm = 0.0;  // / max performance rainflow damage
    double damage_spectral_norm = 0.0;  // / max performance spectral damage
    double rms_error_norm = 0.0;        // / sigma
    double max_delta_t = 0.0;
    double median_tj = 0.0;
    std::uint64_t seed = 0;
};

struct BandwidthSummary {
    double bandwidth = 0.0;
    double damage_performance = 0.0;  // mean normalized rainflow damage
    double damage_reliability = 0.0;
    double damage_ratio = 0.0;        // reliability / performance
    double error_performance = 0.0;   // mean normalized RMS error
    double error_reliability = 0.0;
    double error_ratio = 0.0;
};

struct StudyTable {
    std::vector<StudyRow> rows;  // ordered by (bandwidth index, trial, design)
    std::vector<BandwidthSummary> summary;
};

/// Every cell uses seed derive_seed(base.seed, bandwidth index, trial), so
/// results do not depend on thread count or scheduling.
StudyTable monte_carlo(const StudySpec& study, const std::array<const SynthesisResult*, 2>& designs,
                       const DamageModels& models);

}  // namespace relcon
