#include "relcon/thermal.hpp"

#include <cmath>

#include "relcon/error.hpp"
#include "relcon/log.hpp"

namespace relcon {

void LossParams::validate() const {
    require(std::isfinite(r_on) && r_on > 0.0, "loss: r_on must be > 0");
    require(std::isfinite(p_sw) && p_sw >= 0.0, "loss: p_sw must be >= 0");
    require(std::isfinite(i_op) && i_op >= 0.0, "loss: i_op must be >= 0");
}

void FosterNetwork::validate() const {
    require(!stages.empty(), "thermal: Foster network needs at least one stage");
    for (const auto& s : stages) {
        require(std::isfinite(s.r_theta) && s.r_theta > 0.0, "thermal: stage R_theta must be > 0");
        require(std::isfinite(s.c_theta) && s.c_theta > 0.0, "thermal: stage C_theta must be > 0");
    }
    require(std::isfinite(t_ambient) && t_ambient > 0.0, "thermal: t_ambient must be > 0 K");
}

double FosterNetwork::total_resistance() const noexcept {
    double r = 0.0;
    for (const auto& s : stages) {
        r += s.r_theta;
    }
    return r;
}

FosterNetwork FosterNetwork::defaults() {
    FosterNetwork net;
    const double r[] = {0.05, 0.10, 0.15, 0.20};
    const double tau[] = {1e-3, 1e-2, 1e-1, 1.0};
    for (int i = 0; i < 4; ++i) {
        net.stages.push_back({r[i], tau[i] / r[i]});
    }
    return net;
}

double conduction_loss(double current, const LossParams& lp) { return lp.r_on * current * current + lp.p_sw; }

double loss_small_signal_gain(const LossParams& lp) {
    lp.validate();
    if (lp.i_op == 0.0) {
        warn("loss small-signal gain is zero (i_op = 0); the spectral damage functional vanishes");
    }
    return 2.0 * lp.r_on * lp.i_op;
}

TransferFunction thermal_tf(const FosterNetwork& net) {
    net.validate();
    TransferFunction acc({0.0}, {1.0});
    for (const auto& s : net.stages) {
        acc = acc + TransferFunction({s.r_theta}, {s.tau(), 1.0});
    }
    return acc.with_units("K/W");
}

std::vector<double> junction_temperature_from_power(std::span<const double> power, const FosterNetwork& net,
                                                    double dt) {
    net.validate();
    require(std::isfinite(dt) && dt > 0.0, "thermal: dt must be > 0");
    const std::size_t m = net.stages.size();
    std::vector<double> a(m), b(m), x(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        a[k] = std::exp(-dt / net.stages[k].tau());
        b[k] = net.stages[k].r_theta * (1.0 - a[k]);
    }
    std::vector<double> tj(power.size());
    for (std::size_t n = 0; n < power.size(); ++n) {
        const double p = power[n];
        if (!std::isfinite(p)) {
            fail(ErrorKind::Numerical, "thermal: non-finite power sample");
        }
        double rise = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            rise += x[k];
            x[k] = a[k] * x[k] + b[k] * p;
        }
        tj[n] = net.t_ambient + rise;
    }
    return tj;
}

std::vector<double> junction_temperature(std::span<const double> current, const LossParams& lp,
                                         const FosterNetwork& net, double dt) {
    lp.validate();
    std::vector<double> power(current.size());
    for (std::size_t n = 0; n < current.size(); ++n) {
        if (!std::isfinite(current[n])) {
            fail(ErrorKind::Numerical, "thermal: non-finite current sample");
        }
        power[n] = conduction_loss(current[n], lp);
    }
    return junction_temperature_from_power(power, net, dt);
}

}  // namespace relcon
