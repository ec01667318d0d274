#pragma once

// Frequency-domain damage: Welch PSD estimation, single-moment spectral
// fatigue damage and the closed-loop damage functional.
//
// Stress ranges follow the same convention as the S-N curve (cycle range, so
// a narrow-band process with standard deviation s has Rayleigh ranges with
// scale 2s). Each bin of width dw around w contributes the damage rate
//
//     D_i = w/(2 pi c_sn) * (2 sqrt(2 S(w) dw))^k * Gamma(1 + k/2)
//
// and bins combine as (sum D_i^(2/k))^(k/2).
//
// Damage weight. If the stress is the junction temperature and the thermal
// chain G(jw) maps loss power to temperature, then S_T = |G|^2 S_P and each
// bin's contribution to the inner sum is proportional to
// w^(2/k) |G(jw)|^2 S_P(w) dw. Writing that as |W(w)|^2 S_P dw gives
// |W(w)| = w^(1/k) |G(jw)|, reported normalized to unit peak. With
// S_P = |loss_gain * T_r(jw)|^2 S_ref the damage is proportional to
// (sum |W|^2 |loss_gain T_r|^2 S_ref dw)^(k/2).

#include <span>
#include <vector>

#include "relcon/fatigue.hpp"
#include "relcon/lincore.hpp"
#include "relcon/thermal.hpp"

namespace relcon {

/// One-sided PSD over angular frequency: values in unit^2/(rad/s), with the
/// width of every bin.
struct Psd {
    FrequencyGrid grid;
    std::vector<double> values;
    std::vector<double> delta_omega;

    void validate() const;
    /// sum values * delta_omega
    [[nodiscard]] double variance() const;
};

struct DamageWeight {
    FrequencyGrid grid;
    std::vector<double> values;  // |W(w)|, unit peak
};

/// Welch estimate: Hann window, 50% overlap, per-segment mean removal,
/// one-sided, density per rad/s. The DC bin is dropped.
Psd estimate_psd(std::span<const double> signal, double dt, std::size_t segment_len);

/// Single-moment damage accumulated over `duration` seconds.
double single_moment_damage(const Psd& psd, const SnCurve& sn, double duration);

DamageWeight damage_weight(const FosterNetwork& net, const LossParams& lp, const SnCurve& sn,
                           const FrequencyGrid& grid);

/// Linear interpolation in log(omega); zero outside the source support. Bin
/// widths on the target grid come from midpoints between neighbours.
Psd interpolate_psd(const Psd& psd, const FrequencyGrid& grid);

/// Per-point bin widths of an arbitrary grid (midpoint rule).
std::vector<double> bin_widths(const FrequencyGrid& grid);

/// (sum |W|^2 |loss_gain g_cl(jw)|^2 S_ref dw)^(k/2): proportional to, not
/// equal to, the absolute damage. Used to rank controllers.
double closed_loop_damage_functional(const DamageWeight& w, const TransferFunction& g_cl, double loss_gain,
                                     const Psd& s_ref, const SnCurve& sn);

}  // namespace relcon
