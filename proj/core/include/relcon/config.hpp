#pragma once

// Run configuration. JSON with the sections below; every key is optional and
// unknown keys are rejected.
//
//   plant      inductance_H, resistance_Ohm, grid_omega_rad_s, voltage_limit_V
//   thermal    r_theta_K_per_W[], tau_s[], t_ambient_K | t_ambient_C
//   loss       r_on_Ohm, p_sw_W, i_op_A
//   lifetime   a0 (omitted: calibrated to 3e5 cycles at 40 K / 423.15 K / 10 s),
//              a1, alpha, lambda_K, t0_K, c, gamma, k_thick, e_a_eV,
//              k_b_eV_per_K, arrhenius_sign
//   sn         k, c (omitted: calibrated against the lifetime anchor)
//   bounds     performance / reliability: dc_level, bandwidth_rad_s, peak,
//              lift {corner_rad_s, factor} or null
//   reference  sigma_A, bandwidth_rad_s, duration_s, dt_s, seed
//   study      bandwidths_rad_s[], trials, duration_s, seed, psd_segment
//   synthesis  order, integral_action, restarts, seed, grid_points,
//              setpoint_weight, max_evaluations

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "relcon/plant.hpp"
#include "relcon/scenario.hpp"
#include "relcon/synthesis.hpp"

namespace relcon {

struct Config {
    PlantParams plant;
    DamageModels models;
    SensitivityBound performance = SensitivityBound::performance();
    SensitivityBound reliability = SensitivityBound::reliability();
    ReferenceSpec reference;
    StudySpec study;
    SynthesisOptions synthesis;

    /// Runs every module-level check; throws InvalidArgument on the first failure.
    void validate() const;

    [[nodiscard]] const SensitivityBound& bound(Design d) const {
        return d == Design::Performance ? performance : reliability;
    }

    static Config defaults();
};

Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);
/// Fully resolved configuration (calibrated constants included).
nlohmann::json to_json(const Config& c);

}  // namespace relcon
