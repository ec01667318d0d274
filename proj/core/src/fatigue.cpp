#include "relcon/fatigue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "relcon/error.hpp"

namespace relcon {

double CycleHistogram::total_weight() const noexcept {
    double w = 0.0;
    for (const auto& c : cycles) {
        w += c.weight;
    }
    return w;
}

CycleHistogram CycleHistogram::merged(const CycleHistogram& other) const {
    CycleHistogram out{cycles};
    out.cycles.insert(out.cycles.end(), other.cycles.begin(), other.cycles.end());
    return out;
}

void LifetimeParams::validate() const {
    require(std::isfinite(a0) && a0 > 0.0, "lifetime: a0 must be > 0");
    require(std::isfinite(a1) && a1 > 0.0, "lifetime: a1 must be > 0");
    require(std::isfinite(lambda) && lambda > 0.0, "lifetime: lambda must be > 0");
    require(std::isfinite(k_b) && k_b > 0.0, "lifetime: k_b must be > 0");
    require(std::isfinite(k_thick) && k_thick > 0.0, "lifetime: k_thick must be > 0");
    require(std::isfinite(c) && std::isfinite(gamma_exp) && std::isfinite(alpha) && std::isfinite(t0) &&
                std::isfinite(e_a),
            "lifetime: constants must be finite");
    require(c + std::pow(2.0, gamma_exp) > 0.0, "lifetime: C + 2^gamma must be > 0");
    require(arrhenius_sign == 1.0 || arrhenius_sign == -1.0, "lifetime: arrhenius_sign must be +1 or -1");
}

LifetimeParams LifetimeParams::defaults() {
    return calibrate_a0(LifetimeParams{}, kAnchorDeltaT, kAnchorMeanT, kAnchorTon, kAnchorCycles);
}

LifetimeParams calibrate_a0(LifetimeParams p, double delta_t, double mean_t, double t_on, double target_cycles) {
    require(target_cycles > 0.0, "calibrate_a0: target must be > 0");
    p.a0 = 1.0;
    const double unit = cycles_to_failure({delta_t, mean_t, t_on, 1.0}, p);
    require(std::isfinite(unit) && unit > 0.0, "calibrate_a0: anchor cycle gives a degenerate lifetime");
    p.a0 = target_cycles / unit;
    return p;
}

void SnCurve::validate() const {
    require(std::isfinite(c_sn) && c_sn > 0.0, "sn: c_sn must be > 0");
    require(std::isfinite(k_sn) && k_sn > 0.0, "sn: k_sn must be > 0");
}

SnCurve calibrate_sn(const LifetimeParams& p, double k_sn) {
    const double dt = LifetimeParams::kAnchorDeltaT;
    const double nf = cycles_to_failure({dt, LifetimeParams::kAnchorMeanT, LifetimeParams::kAnchorTon, 1.0}, p);
    SnCurve sn{nf * std::pow(dt, k_sn), k_sn};
    sn.validate();
    return sn;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> turning_points(std::span<const double> x) {
    std::vector<std::size_t> idx;
    if (x.empty()) {
        return idx;
    }
    idx.push_back(0);
    int dir = 0;  // sign of the current excursion
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double d = x[i] - x[idx.back()];
        if (d == 0.0) {
            continue;
        }
        const int s = d > 0.0 ? 1 : -1;
        if (dir == 0 || s == dir) {
            // still moving the same way: the running extreme moves forward
            if (dir != 0) {
                idx.back() = i;
            } else {
                idx.push_back(i);
            }
            dir = s;
        } else {
            idx.push_back(i);
            dir = s;
        }
    }
    return idx;
}

namespace {

ThermalCycle make_cycle(double a, double b, double span, double weight) {
    return {std::abs(a - b), 0.5 * (a + b), span, weight};
}

}  // namespace

CycleHistogram rainflow(std::span<const double> signal, double dt) {
    require(signal.size() >= 2, "rainflow: need at least 2 samples");
    require(std::isfinite(dt) && dt > 0.0, "rainflow: dt must be > 0");
    for (double v : signal) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::Numerical, "rainflow: non-finite sample");
        }
    }
    const auto tp = turning_points(signal);
    CycleHistogram hist;
    if (tp.size() < 2) {
        return hist;
    }

    std::vector<std::size_t> stack;
    stack.reserve(tp.size());
    for (std::size_t k : tp) {
        stack.push_back(k);
        while (stack.size() >= 4) {
            const std::size_t n = stack.size();
            const double a = signal[stack[n - 4]];
            const double b = signal[stack[n - 3]];
            const double c = signal[stack[n - 2]];
            const double d = signal[stack[n - 1]];
            const double inner = std::abs(c - b);
            if (inner <= std::abs(b - a) && inner <= std::abs(d - c)) {
                const double span = static_cast<double>(stack[n - 2] - stack[n - 3]) * dt;
                hist.cycles.push_back(make_cycle(b, c, 2.0 * span, 1.0));
                const std::size_t last = stack[n - 1];
                stack.resize(n - 3);
                stack.push_back(last);
            } else {
                break;
            }
        }
    }
    for (std::size_t j = 0; j + 1 < stack.size(); ++j) {
        const double span = static_cast<double>(stack[j + 1] - stack[j]) * dt;
        hist.cycles.push_back(make_cycle(signal[stack[j]], signal[stack[j + 1]], span, 0.5));
    }
    return hist;
}

double cycles_to_failure(const ThermalCycle& cycle, const LifetimeParams& p) {
    if (!(cycle.mean_t > 0.0) || !std::isfinite(cycle.mean_t)) {
        fail(ErrorKind::InvalidArgument, "cycles_to_failure: mean temperature must be > 0 K");
    }
    require(cycle.delta_t >= 0.0, "cycles_to_failure: delta_t must be >= 0");
    if (cycle.delta_t == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    require(cycle.t_on > 0.0, "cycles_to_failure: t_on must be > 0");
    const double beta = std::exp(-(cycle.delta_t - p.t0) / p.lambda);
    // Work in logs to keep tiny cycles (huge N_f) finite as long as possible.
    const double log_nf = std::log(p.a0) + beta * std::log(p.a1) + (p.alpha - beta) * std::log(cycle.delta_t) +
                          p.arrhenius_sign * p.e_a / (p.k_b * cycle.mean_t) +
                          std::log((p.c + std::pow(cycle.t_on, p.gamma_exp)) / (p.c + std::pow(2.0, p.gamma_exp))) +
                          std::log(p.k_thick);
    return std::exp(log_nf);
}

double basquin_nf(double stress, const SnCurve& sn) {
    require(stress > 0.0, "basquin_nf: stress must be > 0");
    return sn.c_sn * std::pow(stress, -sn.k_sn);
}

double miner_damage(const CycleHistogram& hist, const LifetimeParams& p) {
    double d = 0.0;
    for (const auto& c : hist.cycles) {
        if (c.delta_t > 0.0) {
            d += c.weight / cycles_to_failure(c, p);
        }
    }
    return d;
}

double miner_damage(const CycleHistogram& hist, const SnCurve& sn) {
    double d = 0.0;
    for (const auto& c : hist.cycles) {
        if (c.delta_t > 0.0) {
            d += c.weight * std::pow(c.delta_t, sn.k_sn) / sn.c_sn;
        }
    }
    return d;
}

LifetimeReport lifetime_report(double damage, double mission_s) {
    require(damage >= 0.0 && mission_s >= 0.0, "lifetime_report: damage and mission must be >= 0");
    const double life = damage > 0.0 ? mission_s / damage : std::numeric_limits<double>::infinity();
    return {damage, mission_s, life};
}

CycleHistogram bin_histogram(const CycleHistogram& hist, std::size_t bins) {
    require(bins >= 1, "bin_histogram: bins must be >= 1");
    if (hist.cycles.empty()) {
        return {};
    }
    double rmax = 0.0;
    double mlo = std::numeric_limits<double>::infinity();
    double mhi = -mlo;
    for (const auto& c : hist.cycles) {
        rmax = std::max(rmax, c.delta_t);
        mlo = std::min(mlo, c.mean_t);
        mhi = std::max(mhi, c.mean_t);
    }
    const double rw = rmax > 0.0 ? rmax / static_cast<double>(bins) : 1.0;
    const double mw = mhi > mlo ? (mhi - mlo) / static_cast<double>(bins) : 1.0;
    auto cell = [bins](double v, double lo, double w) {
        auto i = static_cast<std::size_t>((v - lo) / w);
        return std::min(i, bins - 1);
    };

    struct Acc {
        double weight = 0.0;
        double ton = 0.0;
    };
    // Full and half cycles stay in separate cells so weights remain in {0.5, 1}.
    std::map<std::tuple<std::size_t, std::size_t, bool>, Acc> cells;
    for (const auto& c : hist.cycles) {
        auto& a = cells[{cell(c.delta_t, 0.0, rw), cell(c.mean_t, mlo, mw), c.weight == 1.0}];
        a.weight += c.weight;
        a.ton += c.weight * c.t_on;
    }
    CycleHistogram out;
    for (const auto& [key, acc] : cells) {
        const auto [ri, mi, full] = key;
        const double range = (static_cast<double>(ri) + 0.5) * rw;
        const double mean = mlo + (static_cast<double>(mi) + 0.5) * mw;
        out.cycles.push_back({range, mean, acc.ton / acc.weight, acc.weight});
    }
    return out;
}

}  // namespace relcon
