#pragma once

// Time-domain damage: rainflow counting, the modified Coffin-Manson lifetime
// model, Basquin S-N curves and Miner accumulation.

#include <span>
#include <vector>

namespace relcon {

struct ThermalCycle {
    double delta_t = 0.0;  // cycle range |peak - valley| (K)
    double mean_t = 0.0;   // (peak + valley)/2 (K)
    double t_on = 0.0;     // cycle duration (s)
    double weight = 1.0;   // 1.0 full cycle, 0.5 half cycle
};

struct CycleHistogram {
    std::vector<ThermalCycle> cycles;

    [[nodiscard]] double total_weight() const noexcept;
    /// Concatenation; damage is additive under Miner's rule.
    [[nodiscard]] CycleHistogram merged(const CycleHistogram& other) const;
};

/// Modified Coffin-Manson constants:
///   N_f = A0 A1^b dT^(alpha - b) exp(s Ea/(kB Tj)) (C + t_on^g)/(C + 2^g) k_thick,
///   b = exp(-(dT - T0)/lambda), s = arrhenius_sign.
struct LifetimeParams {
    double a0 = 1.0;
    double a1 = 20.0;
    double alpha = -4.923;
    double lambda = 60.0;      // K
    double t0 = 60.0;          // K
    double c = 1.434;
    double gamma_exp = -1.208;
    double k_thick = 1.0;
    double e_a = 0.0666;       // eV
    double k_b = 8.617e-5;     // eV/K
    double arrhenius_sign = 1.0;

    void validate() const;

    /// Shipped constants with A0 calibrated to the reference anchor below.
    static LifetimeParams defaults();

    static constexpr double kAnchorDeltaT = 40.0;   // K
    static constexpr double kAnchorMeanT = 423.15;  // K
    static constexpr double kAnchorTon = 10.0;      // s
    static constexpr double kAnchorCycles = 3.0e5;
};

/// Returns p with a0 chosen so cycles_to_failure(anchor) == target exactly
/// (up to one rounding).
LifetimeParams calibrate_a0(LifetimeParams p, double delta_t, double mean_t, double t_on, double target_cycles);

/// Basquin curve N_f = c_sn S^(-k_sn), with S the cycle range.
struct SnCurve {
    double c_sn = 1.0;
    double k_sn = 5.0;

    void validate() const;
};

/// c_sn fitted so that basquin_nf(anchor range) equals the Coffin-Manson
/// cycles at the anchor cycle.
SnCurve calibrate_sn(const LifetimeParams& p, double k_sn);

/// Indices of the turning points of a series, endpoints included. Plateaus
/// collapse onto their first sample.
std::vector<std::size_t> turning_points(std::span<const double> signal);

/// Four-point rainflow count (ASTM E1049-85 equivalent). `dt` is the sample
/// period used for cycle durations: half cycles last the span between their
/// extrema, full cycles twice the span of the closing excursion.
CycleHistogram rainflow(std::span<const double> signal, double dt);

double cycles_to_failure(const ThermalCycle& cycle, const LifetimeParams& p);
double basquin_nf(double stress, const SnCurve& sn);

/// Sum of weight/N_f with the Coffin-Manson model.
double miner_damage(const CycleHistogram& hist, const LifetimeParams& p);
/// Sum of weight/N_f with a Basquin curve (stress = cycle range).
double miner_damage(const CycleHistogram& hist, const SnCurve& sn);

struct LifetimeReport {
    double damage = 0.0;
    double mission_s = 0.0;
    double lifetime_s = 0.0;  // mission_s / damage, +inf for zero damage
};

LifetimeReport lifetime_report(double damage, double mission_s);

/// Range-mean binning onto a bins x bins lattice for compact reports. Each
/// cell becomes one entry at the cell centre whose weight is the summed count
/// (so binned weights are not restricted to {0.5, 1}); t_on is the
/// weight-averaged duration of the cell.
CycleHistogram bin_histogram(const CycleHistogram& hist, std::size_t bins = 64);

}  // namespace relcon
