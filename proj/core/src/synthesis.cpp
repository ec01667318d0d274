#include "relcon/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "relcon/optimize.hpp"
#include "relcon/rng.hpp"

namespace relcon {

void SensitivityBound::validate() const {
    require(std::isfinite(dc_level) && dc_level > 0.0 && dc_level < 1.0, "bound: dc_level must be in (0, 1)");
    require(std::isfinite(bandwidth) && bandwidth > 0.0, "bound: bandwidth must be > 0");
    // peak < 1 is a valid request that no proper controller can meet; synthesize reports it as infeasible
    require(std::isfinite(peak) && peak > 0.0, "bound: peak must be > 0");
    if (lift) {
        require(std::isfinite(lift->corner) && lift->corner > 0.0, "bound: lift corner must be > 0");
        require(std::isfinite(lift->lift) && lift->lift >= 1.0, "bound: lift factor must be >= 1");
    }
}

std::vector<double> SensitivityBound::corners() const {
    std::vector<double> c{bandwidth * dc_level, bandwidth * peak};
    if (lift) {
        c.push_back(lift->corner / lift->lift);
        c.push_back(lift->corner);
    }
    return c;
}

SensitivityBound SensitivityBound::performance() { return {}; }

SensitivityBound SensitivityBound::reliability() {
    SensitivityBound b;
    b.lift = BoundLift{};
    return b;
}

TransferFunction build_bound_tf(const SensitivityBound& b) {
    b.validate();
    TransferFunction w({1.0, b.bandwidth * b.dc_level}, {1.0 / b.peak, b.bandwidth});
    if (b.lift) {
        const double l = b.lift->lift;
        const double c = b.lift->corner;
        w = w * TransferFunction({l / c, l}, {l / c, 1.0});
    }
    // An integrator forces |S| -> 0 at DC, so the bound has to stay below 1
    // well inside the tracking band.
    const double lo = b.bandwidth / 100.0;
    const auto probe = FrequencyGrid::log_spaced(1e-6 * lo, lo, 200);
    for (const double om : probe.points()) {
        if (std::abs(w.eval({0.0, om})) >= 1.0) {
            fail(ErrorKind::InvalidArgument, "bound admits no integral action");
        }
    }
    return w.with_units("1");
}

void SynthesisOptions::validate() const {
    require(order >= 1, "synthesis: order must be >= 1");
    require(restarts >= 1, "synthesis: restarts must be >= 1");
    require(grid_points >= 10, "synthesis: grid_points must be >= 10");
    require(grid_lo > 0.0 && grid_hi > grid_lo, "synthesis: grid bounds must satisfy 0 < lo < hi");
    require(max_evaluations >= 10, "synthesis: max_evaluations must be >= 10");
    if (setpoint_weight) {
        require(std::isfinite(*setpoint_weight) && *setpoint_weight >= 0.0,
                "synthesis: setpoint weight must be >= 0");
        require(integral_action, "synthesis: two-dof structure needs integral action");
    }
}

namespace {

// Relative gamma slack granted to the shaping phase.
constexpr double kShapeSlack = 1e-3;

// Controller family in log coordinates.
//   integral:     theta = [ln k, ln z, ln a1, ln b1, ...]
//                 K = k (s + z)/s * prod (s/a + 1)/(s/b + 1) * 1/(s/p_f + 1)
//   proportional: theta = [ln k, ln a1, ln b1, ...]
//                 K = k * prod (s/a + 1)/(s/b + 1)
// The fixed roll-off p_f keeps K strictly proper; without it |S(inf)| = 1
// pins gamma at 1/M_s and the optimum is degenerate.
struct Family {
    bool integral = true;
    double roll_off = 0.0;
    std::size_t pairs = 0;

    [[nodiscard]] std::size_t dim() const { return (integral ? 2 : 1) + 2 * pairs; }

    [[nodiscard]] Complex eval(std::span<const double> th, Complex s) const {
        std::size_t i = 0;
        const double k = std::exp(th[i++]);
        Complex v = k;
        if (integral) {
            const double z = std::exp(th[i++]);
            v *= (s + z) / s / (s / roll_off + 1.0);
        }
        for (std::size_t p = 0; p < pairs; ++p) {
            const double a = std::exp(th[i++]);
            const double b = std::exp(th[i++]);
            v *= (s / a + 1.0) / (s / b + 1.0);
        }
        return v;
    }

    // With a setpoint weight the proportional path of the numerator is scaled.
    [[nodiscard]] TransferFunction tf(std::span<const double> th, std::optional<double> setpoint = {}) const {
        std::size_t i = 0;
        const double k = std::exp(th[i++]);
        Poly num{k};
        Poly den{1.0};
        if (integral) {
            const double z = std::exp(th[i++]);
            num = setpoint ? Poly{k * *setpoint, k * z} : Poly{k, k * z};
            den = poly::mul({1.0, 0.0}, {1.0 / roll_off, 1.0});
        }
        for (std::size_t p = 0; p < pairs; ++p) {
            const double a = std::exp(th[i++]);
            const double b = std::exp(th[i++]);
            num = poly::mul(num, {1.0 / a, 1.0});
            den = poly::mul(den, {1.0 / b, 1.0});
        }
        return TransferFunction(num, den, "V/A");
    }
};

Poly characteristic(const TransferFunction& plant, const TransferFunction& k) {
    return poly::trim(poly::add(poly::mul(plant.den(), k.den()), poly::mul(plant.num(), k.num())));
}

struct Problem {
    Family fam;
    const TransferFunction* plant = nullptr;
    std::vector<Complex> s;
    std::vector<Complex> p;
    std::vector<double> inv_w;

    double gamma(std::span<const double> th) const {
        if (!is_hurwitz(characteristic(*plant, fam.tf(th)))) {
            return 1e6;
        }
        double g = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Complex l = p[i] * fam.eval(th, s[i]);
            g = std::max(g, inv_w[i] / std::abs(1.0 + l));
        }
        return g;
    }

    // Phase 2: with max |S/W| capped at `cap`, maximize the mean of
    // log |S/W| over [band_lo, band_hi] so S follows the bound shape inside
    // the tracking band.
    double band_lo = 0.0;
    double band_hi = 0.0;
    double cap = 0.0;

    double tightness(std::span<const double> th) const {
        if (!is_hurwitz(characteristic(*plant, fam.tf(th)))) {
            return 1e6;
        }
        double g = 0.0;
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Complex l = p[i] * fam.eval(th, s[i]);
            const double r = inv_w[i] / std::abs(1.0 + l);
            g = std::max(g, r);
            if (s[i].imag() >= band_lo && s[i].imag() <= band_hi) {
                sum += std::log(r);
                ++n;
            }
        }
        if (g > cap) {
            return 10.0 + g;
        }
        return -sum / static_cast<double>(std::max<std::size_t>(n, 1));
    }
};

std::vector<double> start_point(const Problem& pr, const SensitivityBound& b, const TransferFunction& w_up,
                                std::size_t restart, std::uint64_t seed) {
    // Target-sensitivity inversion K0 = (1 - S0)/(S0 P) with S0 = W_up/M_s.
    auto k0 = [&](double om) {
        const Complex s{0.0, om};
        const Complex s0 = w_up.eval(s) / b.peak;
        return std::abs((1.0 - s0) / (s0 * pr.plant->eval(s)));
    };
    std::vector<double> th;
    if (pr.fam.integral) {
        const double k = k0(10.0 * b.bandwidth);
        const double w1 = 10.0 * b.bandwidth * b.dc_level;
        th.push_back(std::log(k));
        th.push_back(std::log(w1 * k0(w1) / k));
    } else {
        th.push_back(std::log(k0(b.bandwidth)));
    }
    for (std::size_t p = 0; p < pr.fam.pairs; ++p) {
        const double c = std::log(b.bandwidth / 10.0) - std::log(10.0) * static_cast<double>(p);
        th.push_back(c);
        th.push_back(c);
    }
    if (restart == 0) {
        return th;
    }
    const CounterRng rng(derive_seed(seed, 0xC0DE, restart));
    const std::size_t head = pr.fam.integral ? 2 : 1;
    for (std::size_t i = 0; i < th.size(); ++i) {
        if (i < head) {
            th[i] += rng.normal(i);
        } else {
            // lead-lag corners uniform in ln over [-1, 3]
            th[i] = -1.0 + 4.0 * rng.uniform(1000 + i);
        }
    }
    return th;
}

struct RestartOutcome {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
};

RestartOutcome run_restart(const Problem& pr, std::vector<double> x0, const SynthesisOptions& opt) {
    auto f = [&pr](std::span<const double> th) { return pr.gamma(th); };
    NelderMeadOptions nm;
    nm.max_evaluations = opt.max_evaluations;
    auto r = nelder_mead(f, std::move(x0), nm);
    // one restart from the converged point to escape a collapsed simplex
    nm.initial_step = 0.1;
    auto r2 = nelder_mead(f, r.x, nm);
    if (r2.value < r.value) {
        r = std::move(r2);
    }
    return {std::move(r.x), r.value};
}

// Runs body(i) for i < n on `threads` workers; each index writes its own slot.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                body(i);
            }
        });
    }
}

}  // namespace

SynthesisResult synthesize(const TransferFunction& plant, const SensitivityBound& bound,
                           const SynthesisOptions& opt) {
    bound.validate();
    opt.validate();
    require(plant.is_proper(), "synthesize: plant must be proper");
    if (bound.peak < 1.0) {
        // |S(j inf)| = 1 for any strictly proper loop
        throw InfeasibleError(1.0 / bound.peak,
                              fmt::format("bound admits no controller: peak {:.4g} < 1 while |S| -> 1 at high "
                                          "frequency (best gamma >= {:.4g})",
                                          bound.peak, 1.0 / bound.peak));
    }
    const TransferFunction w_up = build_bound_tf(bound);

    Problem pr;
    pr.plant = &plant;
    pr.fam.integral = opt.integral_action;
    pr.fam.pairs = opt.order - 1;
    const auto corners = bound.corners();
    pr.fam.roll_off = 10.0 * *std::max_element(corners.begin(), corners.end());

    const FrequencyGrid grid = FrequencyGrid::log_spaced(opt.grid_lo, opt.grid_hi, opt.grid_points);
    pr.p = freq_response(plant, grid);
    const auto wv = freq_response(w_up, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        pr.s.emplace_back(0.0, grid[i]);
        pr.inv_w.push_back(1.0 / std::abs(wv[i]));
    }

    std::vector<RestartOutcome> outcomes(opt.restarts);
    std::size_t nthreads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
    nthreads = std::min(nthreads, opt.restarts);
    parallel_for(opt.restarts, nthreads, [&](std::size_t r) {
        outcomes[r] = run_restart(pr, start_point(pr, bound, w_up, r, opt.seed), opt);
    });

    // lowest gamma, ties to the lowest restart index
    std::size_t best = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r) {
        if (outcomes[r].value < outcomes[best].value) {
            best = r;
        }
    }
    std::vector<double> x = outcomes[best].x;


    pr.band_lo = 5.0 * bound.bandwidth * bound.dc_level;
    pr.band_hi = 0.5 * bound.bandwidth;
    if (opt.integral_action && pr.band_lo < pr.band_hi && outcomes[best].value <= 1.0) {
        pr.cap = outcomes[best].value * (1.0 + kShapeSlack);
        std::vector<RestartOutcome> shaped(opt.restarts);
        parallel_for(opt.restarts, nthreads, [&](std::size_t r) {
            NelderMeadOptions nm;
            nm.max_evaluations = opt.max_evaluations;
            nm.initial_step = 0.2;
            auto f = [&pr](std::span<const double> th) { return pr.tightness(th); };
            auto a = nelder_mead(f, outcomes[r].x, nm);
            auto b = nelder_mead(f, a.x, nm);
            shaped[r] = b.value < a.value ? RestartOutcome{b.x, b.value} : RestartOutcome{a.x, a.value};
        });
        std::size_t pick = 0;
        for (std::size_t r = 1; r < shaped.size(); ++r) {
            if (shaped[r].value < shaped[pick].value) {
                pick = r;
            }
        }
        if (shaped[pick].value < 10.0) {
            x = shaped[pick].x;
            best = pick;
        }
    }

    Controller ctl{pr.fam.tf(x), std::nullopt, ControllerStructure::OneDof};
    if (opt.setpoint_weight) {
        ctl.feedforward = pr.fam.tf(x, opt.setpoint_weight);
        ctl.structure = ControllerStructure::TwoDof;
    }
    const bool stable = is_hurwitz(characteristic(plant, ctl.feedback));
    if (!stable) {
        throw InfeasibleError(std::numeric_limits<double>::infinity(),
                              "synthesis found no stabilizing controller");
    }
    const ClosedLoop cl = closed_loop(plant, ctl);
    // W_up has its zeros in the left half plane, so S/W_up is stable.
    const TransferFunction weighted(poly::mul(cl.sensitivity.num(), w_up.den()),
                                    poly::mul(cl.sensitivity.den(), w_up.num()));
    const NormEstimate cert = hinf_norm_on_grid(weighted, grid);
    if (cert.value > kGammaTolerance) {
        throw InfeasibleError(cert.value, fmt::format("bound infeasible: best gamma {:.4g} > 1", cert.value));
    }

    SynthesisResult res{ctl, cert.value, cert.omega, cl.sensitivity, cl.tracking, grid, stable, x, best};
    return res;
}

ClosedLoop closed_loop(const TransferFunction& plant, const Controller& k) {
    if (k.feedforward) {
        require(k.feedforward->den() == k.feedback.den(), "closed_loop: K_r must share the denominator of K_y");
    }
    const Poly ch = characteristic(plant, k.feedback);
    if (!is_hurwitz(ch)) {
        fail(ErrorKind::Numerical, "closed loop is unstable");
    }
    // S = Dp Dk / ch, T_r = Np Nr Dk / (Dr ch); for one-dof Nr/Dr = Nk/Dk.
    TransferFunction sens(poly::mul(plant.den(), k.feedback.den()), ch, "1");
    TransferFunction track = k.feedforward
                                 ? TransferFunction(poly::mul(plant.num(), k.feedforward->num()), ch, "A/A")
                                 : TransferFunction(poly::mul(plant.num(), k.feedback.num()), ch, "A/A");
    return {std::move(sens), std::move(track)};
}

StepMetrics step_metrics(const TransferFunction& tracking, double dt) {
    require(std::isfinite(dt) && dt > 0.0, "step_metrics: dt must be > 0");
    require(tracking.is_proper(), "step_metrics: tracking model must be proper");
    if (!is_hurwitz(tracking.den())) {
        fail(ErrorKind::Numerical, "step_metrics: tracking model is unstable");
    }
    const double yf = tracking.dc_gain();
    require(std::isfinite(yf) && yf != 0.0, "step_metrics: final value must be finite and nonzero");
    const double band = 0.02 * std::abs(yf);
    const ZohDiscretization zoh(realize(tracking), dt);

    constexpr std::size_t kMaxSamples = 1'000'000;
    for (std::size_t n = 1000;; n = std::min(2 * n, kMaxSamples)) {
        const std::vector<double> u(n, 1.0);
        const auto y = simulate_lti(zoh, u);
        std::size_t last_out = 0;
        bool any_out = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(y[i] - yf) > band) {
                last_out = i;
                any_out = true;
            }
        }
        if (!any_out || last_out < n / 2) {
            StepMetrics m;
            const double target = 0.9 * yf;
            for (std::size_t i = 1; i < n; ++i) {
                if ((y[i] - target) * (y[i - 1] - target) <= 0.0 && y[i] != y[i - 1]) {
                    const double f = (target - y[i - 1]) / (y[i] - y[i - 1]);
                    m.rise_time = (static_cast<double>(i - 1) + f) * dt;
                    break;
                }
            }
            if (any_out) {
                // interpolate the band crossing between last_out and last_out + 1
                const double edge = y[last_out] > yf ? yf + band : yf - band;
                const double a = y[last_out];
                const double b = y[last_out + 1];
                const double f = b != a ? std::clamp((edge - a) / (b - a), 0.0, 1.0) : 0.0;
                m.settling_time = (static_cast<double>(last_out) + f) * dt;
            }
            double peak = 0.0;
            for (double v : y) {
                peak = std::max(peak, v / yf);
            }
            m.overshoot = std::max(0.0, peak - 1.0);
            return m;
        }
        if (n == kMaxSamples) {
            fail(ErrorKind::Numerical, "step_metrics: response did not settle within 1e6 samples");
        }
    }
}

std::vector<BodeRow> bode_table(const SynthesisResult& r, const SensitivityBound& b, const FrequencyGrid& grid) {
    const auto s = freq_response(r.sensitivity, grid);
    const auto w = freq_response(build_bound_tf(b), grid);
    const auto t = freq_response(r.closed_loop, grid);
    std::vector<BodeRow> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows[i] = {grid[i], std::abs(s[i]), std::abs(w[i]), std::abs(t[i])};
    }
    return rows;
}

}  // namespace relcon
