#pragma once

// Device conduction loss and Foster RC thermal chain.

#include <span>
#include <vector>

#include "relcon/lincore.hpp"

namespace relcon {

struct LossParams {
    double r_on = 0.025;          // drain-source on-state resistance (Ohm)
    double p_sw = 0.0;            // switching loss (W)
    double i_op = 40.0;           // linearization current I0 (A)

    void validate() const;
};

/// One Foster stage: R C dT/dt + dT = R P.
struct FosterStage {
    double r_theta = 0.0;  // K/W
    double c_theta = 0.0;  // J/K

    [[nodiscard]] double tau() const noexcept { return r_theta * c_theta; }
};

struct FosterNetwork {
    std::vector<FosterStage> stages;
    double t_ambient = 313.15;  // K

    void validate() const;
    [[nodiscard]] double total_resistance() const noexcept;

    /// Four stages, R = {0.05, 0.10, 0.15, 0.20} K/W, tau = {1 ms, 10 ms, 100 ms, 1 s}.
    static FosterNetwork defaults();
};

/// r_on i^2 + p_sw.
double conduction_loss(double current, const LossParams& lp);

/// d/di (r_on i^2) at i_op, i.e. 2 r_on i_op (W/A). Warns when i_op = 0.
double loss_small_signal_gain(const LossParams& lp);

/// Junction temperature rise per watt: sum of R_k/(R_k C_k s + 1).
TransferFunction thermal_tf(const FosterNetwork& net);

/// T_j(t) = t_ambient + thermal chain driven by conduction_loss(i(t)); each
/// stage is discretized exactly under zero-order hold.
std::vector<double> junction_temperature(std::span<const double> current, const LossParams& lp,
                                         const FosterNetwork& net, double dt);

/// Same chain driven directly by a power trajectory (W).
std::vector<double> junction_temperature_from_power(std::span<const double> power, const FosterNetwork& net,
                                                    double dt);

}  // namespace relcon
