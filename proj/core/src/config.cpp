#include "relcon/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

namespace relcon {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects whatever was not consumed.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        require(j_.is_object(), fmt::format("config: '{}' must be an object", name_));
    }

    [[nodiscard]] bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = j_.at(key);
        require(v.is_number(), fmt::format("config: {}.{} must be a number", name_, key));
        return v.get<double>();
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = j_.at(key);
        require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
                fmt::format("config: {}.{} must be a non-negative integer", name_, key));
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = j_.at(key);
        require(v.is_boolean(), fmt::format("config: {}.{} must be true or false", name_, key));
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = j_.at(key);
        require(v.is_array(), fmt::format("config: {}.{} must be an array of numbers", name_, key));
        std::vector<double> out;
        for (const auto& e : v) {
            require(e.is_number(), fmt::format("config: {}.{} must be an array of numbers", name_, key));
            out.push_back(e.get<double>());
        }
        return out;
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    [[nodiscard]] bool present(const std::string& key) const { return j_.contains(key); }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                fail(ErrorKind::InvalidArgument, fmt::format("config: unknown key '{}.{}'", name_, key));
            }
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

SensitivityBound parse_bound(const json& j, const std::string& name, SensitivityBound b) {
    Section s(j, name);
    b.dc_level = s.number("dc_level", b.dc_level);
    b.bandwidth = s.number("bandwidth_rad_s", b.bandwidth);
    b.peak = s.number("peak", b.peak);
    if (s.present("lift")) {
        const json& l = s.raw("lift");
        if (l.is_null()) {
            b.lift.reset();
        } else {
            Section ls(l, name + ".lift");
            BoundLift lift = b.lift.value_or(BoundLift{});
            lift.corner = ls.number("corner_rad_s", lift.corner);
            lift.lift = ls.number("factor", lift.lift);
            ls.finish();
            b.lift = lift;
        }
    }
    s.finish();
    return b;
}

json bound_json(const SensitivityBound& b) {
    json j{{"dc_level", b.dc_level}, {"bandwidth_rad_s", b.bandwidth}, {"peak", b.peak}, {"lift", nullptr}};
    if (b.lift) {
        j["lift"] = {{"corner_rad_s", b.lift->corner}, {"factor", b.lift->lift}};
    }
    return j;
}

}  // namespace

void Config::validate() const {
    plant.validate();
    models.network.validate();
    models.loss.validate();
    models.lifetime.validate();
    models.sn.validate();
    require(models.psd_segment >= 8, "config: study.psd_segment must be >= 8");
    performance.validate();
    reliability.validate();
    build_bound_tf(performance);
    build_bound_tf(reliability);
    reference.validate();
    study.validate();
    synthesis.validate();
}

Config Config::defaults() {
    Config c;
    c.models.sn = calibrate_sn(c.models.lifetime, 5.0);
    c.reference.duration = 3600.0;
    return c;
}

Config parse_config(const json& j) {
    Config c = Config::defaults();
    Section top(j, "config");

    if (top.has("plant")) {
        Section s(top.raw("plant"), "plant");
        c.plant.inductance = s.number("inductance_H", c.plant.inductance);
        c.plant.resistance = s.number("resistance_Ohm", c.plant.resistance);
        c.plant.omega = s.number("grid_omega_rad_s", c.plant.omega);
        if (s.has("voltage_limit_V")) {
            c.plant.voltage_limit = s.number("voltage_limit_V", 0.0);
        }
        s.finish();
    }

    if (top.has("thermal")) {
        Section s(top.raw("thermal"), "thermal");
        std::vector<double> r, tau;
        for (const auto& st : c.models.network.stages) {
            r.push_back(st.r_theta);
            tau.push_back(st.tau());
        }
        r = s.numbers("r_theta_K_per_W", r);
        tau = s.numbers("tau_s", tau);
        require(r.size() == tau.size(), "config: thermal.r_theta_K_per_W and thermal.tau_s differ in length");
        c.models.network.stages.clear();
        for (std::size_t i = 0; i < r.size(); ++i) {
            require(r[i] > 0.0, "config: thermal.r_theta_K_per_W entries must be > 0");
            c.models.network.stages.push_back({r[i], tau[i] / r[i]});
        }
        const bool k = s.has("t_ambient_K");
        const bool cel = s.has("t_ambient_C");
        require(!(k && cel), "config: give thermal.t_ambient_K or thermal.t_ambient_C, not both");
        if (k) {
            c.models.network.t_ambient = s.number("t_ambient_K", 0.0);
        } else if (cel) {
            c.models.network.t_ambient = s.number("t_ambient_C", 0.0) + 273.15;
        }
        s.finish();
    }

    if (top.has("loss")) {
        Section s(top.raw("loss"), "loss");
        c.models.loss.r_on = s.number("r_on_Ohm", c.models.loss.r_on);
        c.models.loss.p_sw = s.number("p_sw_W", c.models.loss.p_sw);
        c.models.loss.i_op = s.number("i_op_A", c.models.loss.i_op);
        s.finish();
    }

    LifetimeParams& lp = c.models.lifetime;
    bool a0_given = false;
    if (top.has("lifetime")) {
        Section s(top.raw("lifetime"), "lifetime");
        a0_given = s.has("a0");
        lp.a0 = s.number("a0", lp.a0);
        lp.a1 = s.number("a1", lp.a1);
        lp.alpha = s.number("alpha", lp.alpha);
        lp.lambda = s.number("lambda_K", lp.lambda);
        lp.t0 = s.number("t0_K", lp.t0);
        lp.c = s.number("c", lp.c);
        lp.gamma_exp = s.number("gamma", lp.gamma_exp);
        lp.k_thick = s.number("k_thick", lp.k_thick);
        lp.e_a = s.number("e_a_eV", lp.e_a);
        lp.k_b = s.number("k_b_eV_per_K", lp.k_b);
        lp.arrhenius_sign = s.number("arrhenius_sign", lp.arrhenius_sign);
        s.finish();
    }
    lp.validate();
    if (!a0_given) {
        lp = calibrate_a0(lp, LifetimeParams::kAnchorDeltaT, LifetimeParams::kAnchorMeanT, LifetimeParams::kAnchorTon,
                          LifetimeParams::kAnchorCycles);
    }

    double k_sn = c.models.sn.k_sn;
    std::optional<double> c_sn;
    if (top.has("sn")) {
        Section s(top.raw("sn"), "sn");
        k_sn = s.number("k", k_sn);
        if (s.has("c")) {
            c_sn = s.number("c", 0.0);
        }
        s.finish();
    }
    require(k_sn > 0.0, "config: sn.k must be > 0");
    c.models.sn = c_sn ? SnCurve{*c_sn, k_sn} : calibrate_sn(lp, k_sn);

    if (top.has("bounds")) {
        Section s(top.raw("bounds"), "bounds");
        if (s.has("performance")) {
            c.performance = parse_bound(s.raw("performance"), "bounds.performance", c.performance);
        }
        if (s.has("reliability")) {
            c.reliability = parse_bound(s.raw("reliability"), "bounds.reliability", c.reliability);
        }
        s.finish();
    }

    if (top.has("reference")) {
        Section s(top.raw("reference"), "reference");
        c.reference.sigma = s.number("sigma_A", c.reference.sigma);
        c.reference.bandwidth = s.number("bandwidth_rad_s", c.reference.bandwidth);
        c.reference.duration = s.number("duration_s", c.reference.duration);
        c.reference.dt = s.number("dt_s", c.reference.dt);
        c.reference.seed = s.integer("seed", c.reference.seed);
        s.finish();
    }
    // the study inherits sigma and dt from the reference section
    c.study.base.sigma = c.reference.sigma;
    c.study.base.dt = c.reference.dt;

    if (top.has("study")) {
        Section s(top.raw("study"), "study");
        c.study.bandwidths = s.numbers("bandwidths_rad_s", c.study.bandwidths);
        c.study.trials = s.integer("trials", c.study.trials);
        c.study.base.duration = s.number("duration_s", c.study.base.duration);
        c.study.base.seed = s.integer("seed", c.study.base.seed);
        c.models.psd_segment = s.integer("psd_segment", c.models.psd_segment);
        s.finish();
    }

    if (top.has("synthesis")) {
        Section s(top.raw("synthesis"), "synthesis");
        c.synthesis.order = s.integer("order", c.synthesis.order);
        c.synthesis.integral_action = s.boolean("integral_action", c.synthesis.integral_action);
        c.synthesis.restarts = s.integer("restarts", c.synthesis.restarts);
        c.synthesis.seed = s.integer("seed", c.synthesis.seed);
        c.synthesis.grid_points = s.integer("grid_points", c.synthesis.grid_points);
        c.synthesis.max_evaluations = s.integer("max_evaluations", c.synthesis.max_evaluations);
        if (s.has("setpoint_weight")) {
            c.synthesis.setpoint_weight = s.number("setpoint_weight", 1.0);
        }
        s.finish();
    }
    top.finish();
    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::InvalidArgument, fmt::format("config: cannot open '{}'", path.string()));
    }
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidArgument, fmt::format("config: {}: {}", path.string(), e.what()));
    }
    return parse_config(j);
}

json to_json(const Config& c) {
    json thermal_r = json::array();
    json thermal_tau = json::array();
    for (const auto& st : c.models.network.stages) {
        thermal_r.push_back(st.r_theta);
        thermal_tau.push_back(st.tau());
    }
    const auto& lp = c.models.lifetime;
    json j;
    j["plant"] = {{"inductance_H", c.plant.inductance},
                  {"resistance_Ohm", c.plant.resistance},
                  {"grid_omega_rad_s", c.plant.omega},
                  {"voltage_limit_V", c.plant.voltage_limit ? json(*c.plant.voltage_limit) : json(nullptr)}};
    j["thermal"] = {{"r_theta_K_per_W", thermal_r}, {"tau_s", thermal_tau}, {"t_ambient_K", c.models.network.t_ambient}};
    j["loss"] = {{"r_on_Ohm", c.models.loss.r_on}, {"p_sw_W", c.models.loss.p_sw}, {"i_op_A", c.models.loss.i_op}};
    j["lifetime"] = {{"a0", lp.a0},       {"a1", lp.a1},         {"alpha", lp.alpha},
                     {"lambda_K", lp.lambda}, {"t0_K", lp.t0},   {"c", lp.c},
                     {"gamma", lp.gamma_exp}, {"k_thick", lp.k_thick}, {"e_a_eV", lp.e_a},
                     {"k_b_eV_per_K", lp.k_b}, {"arrhenius_sign", lp.arrhenius_sign}};
    j["sn"] = {{"k", c.models.sn.k_sn}, {"c", c.models.sn.c_sn}};
    j["bounds"] = {{"performance", bound_json(c.performance)}, {"reliability", bound_json(c.reliability)}};
    j["reference"] = {{"sigma_A", c.reference.sigma},
                      {"bandwidth_rad_s", c.reference.bandwidth},
                      {"duration_s", c.reference.duration},
                      {"dt_s", c.reference.dt},
                      {"seed", c.reference.seed}};
    j["study"] = {{"bandwidths_rad_s", c.study.bandwidths},
                  {"trials", c.study.trials},
                  {"duration_s", c.study.base.duration},
                  {"seed", c.study.base.seed},
                  {"psd_segment", c.models.psd_segment}};
    j["synthesis"] = {{"order", c.synthesis.order},
                      {"integral_action", c.synthesis.integral_action},
                      {"restarts", c.synthesis.restarts},
                      {"seed", c.synthesis.seed},
                      {"grid_points", c.synthesis.grid_points},
                      {"max_evaluations", c.synthesis.max_evaluations},
                      {"setpoint_weight", c.synthesis.setpoint_weight ? json(*c.synthesis.setpoint_weight)
                                                                       : json(nullptr)}};
    return j;
}

}  // namespace relcon
