#pragma once

// Decoupled dq-frame model of the inverter RL filter.
//
//   L di_d/dt = v_td - v_d - R i_d + w L i_q
//   L di_q/dt = v_tq - v_q - R i_q - w L i_d
//
// With the auxiliary inputs u_d = v_td - v_d + w L i_q and
// u_q = v_tq - v_q - w L i_d both axes reduce to L di/dt = u - R i.
// The d and q controllers are identical, so the toolkit simulates the q axis.

#include <cmath>
#include <optional>

#include "relcon/lincore.hpp"

namespace relcon {

struct PlantParams {
    double inductance = 1e-3;                 // L_f (H)
    double resistance = 0.1;                  // R_f (Ohm)
    double omega = 2.0 * M_PI * 50.0;         // grid angular frequency (rad/s)
    std::optional<double> voltage_limit;      // terminal-voltage magnitude limit (V)

    void validate() const;
};

struct DqSignals {
    double i_d = 0.0, i_q = 0.0;
    double v_d = 0.0, v_q = 0.0;
    double v_td = 0.0, v_tq = 0.0;
    double u_d = 0.0, u_q = 0.0;
};

struct TerminalVoltage {
    double v_td = 0.0;
    double v_tq = 0.0;
    bool saturated = false;
};

/// G(s) = 1/(L s + R): auxiliary input (V) to axis current (A).
TransferFunction decoupled_plant(const PlantParams& params);

/// Solves the auxiliary-input definition for the modulation voltages, with an
/// optional radial clamp to the voltage limit.
TerminalVoltage reconstruct_terminal_voltage(const DqSignals& sig, const PlantParams& params);

/// Forward auxiliary-input definition (u_d, u_q) from terminal voltages.
std::pair<double, double> auxiliary_inputs(const DqSignals& sig, const PlantParams& params);

/// Coupled state-space model with x = [i_d, i_q] and inputs
/// [v_td - v_d, v_tq - v_q].
StateSpace coupled_dq_model(const PlantParams& params);

}  // namespace relcon
