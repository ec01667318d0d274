#include "relcon/plant.hpp"

#include <cmath>

#include "relcon/error.hpp"

namespace relcon {

void PlantParams::validate() const {
    require(std::isfinite(inductance) && inductance > 0.0, "plant: inductance L_f must be > 0");
    require(std::isfinite(resistance) && resistance >= 0.0, "plant: resistance R_f must be >= 0");
    require(std::isfinite(omega), "plant: omega must be finite");
    if (voltage_limit) {
        require(std::isfinite(*voltage_limit) && *voltage_limit > 0.0, "plant: voltage limit must be > 0");
    }
}

TransferFunction decoupled_plant(const PlantParams& params) {
    params.validate();
    return TransferFunction({1.0}, {params.inductance, params.resistance}, "A/V");
}

TerminalVoltage reconstruct_terminal_voltage(const DqSignals& sig, const PlantParams& params) {
    params.validate();
    const double wl = params.omega * params.inductance;
    TerminalVoltage out;
    out.v_td = sig.u_d + sig.v_d - wl * sig.i_q;
    out.v_tq = sig.u_q + sig.v_q + wl * sig.i_d;
    if (params.voltage_limit) {
        const double mag = std::hypot(out.v_td, out.v_tq);
        if (mag > *params.voltage_limit) {
            const double k = *params.voltage_limit / mag;
            out.v_td *= k;
            out.v_tq *= k;
            out.saturated = true;
        }
    }
    return out;
}

std::pair<double, double> auxiliary_inputs(const DqSignals& sig, const PlantParams& params) {
    const double wl = params.omega * params.inductance;
    return {sig.v_td - sig.v_d + wl * sig.i_q, sig.v_tq - sig.v_q - wl * sig.i_d};
}

StateSpace coupled_dq_model(const PlantParams& params) {
    params.validate();
    const double l = params.inductance;
    Eigen::MatrixXd a(2, 2);
    a << -params.resistance / l, params.omega, -params.omega, -params.resistance / l;
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2) / l;
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    return StateSpace(std::move(a), std::move(b), std::move(c), std::move(d));
}

}  // namespace relcon
