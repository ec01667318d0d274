// relcon: controller synthesis, electro-thermal simulation and damage
// evaluation from the command line.
//
// Exit codes: 0 success, 1 usage/config error, 2 infeasible synthesis,
// 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "relcon/config.hpp"
#include "relcon/io.hpp"
#include "relcon/plant.hpp"
#include "relcon/scenario.hpp"
#include "relcon/spectral.hpp"
#include "relcon/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relcon;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kNumerical = 3 };

struct Options {
    std::string config;
    std::string design = "performance";
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    bool svg = false;
    std::size_t threads = 0;
    std::string csv;
    std::optional<std::string> damage_out;
};

Config load(const Options& o) {
    if (o.config.empty()) {
        return Config::defaults();
    }
    if (!fs::exists(o.config)) {
        fail(ErrorKind::InvalidArgument, fmt::format("config file '{}' not found", o.config));
    }
    return load_config(o.config);
}

SynthesisResult design_for(const Config& cfg, Design d, std::size_t threads) {
    SynthesisOptions so = cfg.synthesis;
    so.threads = threads;
    return synthesize(decoupled_plant(cfg.plant), cfg.bound(d), so);
}

void write_json(const fs::path& p, const json& j) { atomic_write(p, j.dump(2) + "\n"); }

// keeps at most `limit` evenly spaced samples for plotting
PlotSeries decimated(const std::string& label, const std::vector<double>& y, double dt, std::size_t limit) {
    PlotSeries s{label, {}, {}};
    const std::size_t step = std::max<std::size_t>(1, y.size() / limit);
    for (std::size_t i = 0; i < y.size(); i += step) {
        s.x.push_back(static_cast<double>(i) * dt);
        s.y.push_back(y[i]);
    }
    return s;
}

int cmd_synthesize(const Options& o) {
    const Config cfg = load(o);
    const Design d = parse_design(o.design);
    const fs::path out(o.out);
    SynthesisResult r = [&] {
        try {
            return design_for(cfg, d, o.threads);
        } catch (const InfeasibleError& e) {
            std::cout << fmt::format("design={} gamma={:.4g} feasible=false\n", to_string(d), e.best_gamma());
            throw;
        }
    }();
    const auto& bound = cfg.bound(d);
    const std::string tag(to_string(d));
    write_json(out / fmt::format("controller_{}.json", tag), controller_json(r, d, bound));
    const auto rows = bode_table(r, bound, FrequencyGrid::log_spaced(1e-2, 1e5, 400));
    atomic_write(out / fmt::format("bode_{}.csv", tag), bode_csv(rows));
    if (o.svg) {
        PlotSeries s{"|S|", {}, {}}, w{"bound", {}, {}}, t{"|T_r|", {}, {}};
        for (const auto& row : rows) {
            s.x.push_back(row.omega), s.y.push_back(row.s_mag);
            w.x.push_back(row.omega), w.y.push_back(row.bound);
            t.x.push_back(row.omega), t.y.push_back(row.tracking_mag);
        }
        atomic_write(out / fmt::format("bode_{}.svg", tag),
                     svg_plot({fmt::format("Sensitivity, {} design", tag), "omega (rad/s)", "magnitude", true, true},
                              {s, w, t}));
    }
    const auto m = step_metrics(r.closed_loop, 1e-6);
    std::cout << fmt::format("design={} gamma={:.4g} feasible={} rise_time_s={:.4g} settling_time_s={:.4g}\n", tag,
                             r.gamma, r.gamma <= 1.0 ? "true" : "false", m.rise_time, m.settling_time);
    return r.gamma <= 1.0 ? kOk : kInfeasible;
}

int cmd_simulate(const Options& o) {
    Config cfg = load(o);
    if (o.seed) {
        cfg.reference.seed = *o.seed;
    }
    const Design d = parse_design(o.design);
    const SynthesisResult r = design_for(cfg, d, o.threads);
    TrialTrajectories traj;
    const TrialResult t = simulate_trial(cfg.reference, r, d, cfg.models, traj);
    const double dt = cfg.reference.dt;
    const fs::path out(o.out);
    atomic_write(out / "reference.csv", timeseries_csv(traj.reference, dt, "reference_A"));
    atomic_write(out / "current.csv", timeseries_csv(traj.current, dt, "current_A"));
    atomic_write(out / "tj.csv", timeseries_csv(traj.tj, dt, "tj_K"));
    const double mission = static_cast<double>(traj.tj.size()) * dt;
    json j{{"design", to_string(d)},
           {"seed", t.seed},
           {"samples", traj.tj.size()},
           {"dt_s", dt},
           {"rms_error_A", t.rms_error},
           {"damage_rainflow", t.damage_rainflow},
           {"damage_spectral", t.damage_spectral},
           {"max_dT_K", t.max_delta_t},
           {"median_Tj_K", t.median_tj},
           {"lifetime", lifetime_json(lifetime_report(t.damage_rainflow, mission))}};
    write_json(out / "damage.json", j);
    if (o.svg) {
        atomic_write(out / "tj.svg", svg_plot({fmt::format("Junction temperature, {} design", to_string(d)),
                                               "time (s)", "T_j (K)", false, false},
                                              {decimated("T_j", traj.tj, dt, 4000)}));
    }
    std::cout << j.dump() << "\n";
    return kOk;
}

int cmd_montecarlo(const Options& o) {
    Config cfg = load(o);
    if (o.seed) {
        cfg.study.base.seed = *o.seed;
    }
    const SynthesisResult perf = design_for(cfg, Design::Performance, o.threads);
    const SynthesisResult rel = design_for(cfg, Design::Reliability, o.threads);
    StudySpec study = cfg.study;
    study.threads = o.threads;
    const StudyTable table = monte_carlo(study, {&perf, &rel}, cfg.models);
    const fs::path out(o.out);
    atomic_write(out / "study.csv", study_csv(table));
    const json summary = study_summary_json(table);
    write_json(out / "summary.json", summary);
    if (o.svg) {
        PlotSeries p{"performance", {}, {}}, r{"reliability", {}, {}};
        for (const auto& s : table.summary) {
            p.x.push_back(s.bandwidth), p.y.push_back(s.damage_performance);
            r.x.push_back(s.bandwidth), r.y.push_back(s.damage_reliability);
        }
        atomic_write(out / "damage_vs_bandwidth.svg",
                     svg_plot({"Mean normalized damage", "reference bandwidth (rad/s)", "damage / max", true, false},
                              {p, r}));
    }
    for (const auto& s : table.summary) {
        std::cout << fmt::format("bandwidth={:g} damage_ratio={:.4f} rms_error_ratio={:.4f}\n", s.bandwidth,
                                 s.damage_ratio, s.error_ratio);
    }
    return kOk;
}

int cmd_damage(const Options& o) {
    const Config cfg = load(o);
    const TimeSeries ts = read_timeseries_csv(o.csv);
    const double dt = ts.uniform_dt();
    const StressDamage d = stress_damage(ts.value, dt, cfg.models);
    const double mission = static_cast<double>(ts.value.size()) * dt;
    json j{{"samples", ts.value.size()},
           {"dt_s", dt},
           {"cycles", d.cycles},
           {"max_dT_K", d.max_delta_t},
           {"damage_rainflow", d.rainflow},
           {"damage_spectral", d.spectral},
           {"sn_k", cfg.models.sn.k_sn},
           {"lifetime", lifetime_json(lifetime_report(d.rainflow, mission))}};
    if (o.damage_out) {
        const fs::path out(*o.damage_out);
        write_json(out / "damage.json", j);
        const std::size_t seg = std::min(cfg.models.psd_segment, ts.value.size());
        if (seg >= 8) {
            const Psd psd = estimate_psd(ts.value, dt, seg);
            atomic_write(out / "psd.csv", spectrum_csv(psd.grid, psd.values));
        }
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relcon: reliability-oriented current control toolkit"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON configuration file (defaults when omitted)");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->capture_default_str();
    };
    auto* syn = app.add_subcommand("synthesize", "synthesize a controller and write its JSON and Bode CSV");
    common(syn);
    syn->add_option("--design", o.design, "performance | reliability")->capture_default_str();
    syn->add_flag("--svg", o.svg, "also write an SVG Bode plot");

    auto* sim = app.add_subcommand("simulate", "closed-loop electro-thermal simulation of one design");
    common(sim);
    sim->add_option("--design", o.design, "performance | reliability")->capture_default_str();
    sim->add_option("--seed", o.seed, "reference seed (overrides the config)");
    sim->add_flag("--svg", o.svg, "also write an SVG of T_j");

    auto* mc = app.add_subcommand("montecarlo", "damage versus reference bandwidth for both designs");
    common(mc);
    mc->add_option("--seed", o.seed, "base seed (overrides the config)");
    mc->add_flag("--svg", o.svg, "also write an SVG of damage versus bandwidth");

    auto* dmg = app.add_subcommand("damage", "fatigue damage of a (time_s, value) CSV stress history");
    dmg->add_option("csv", o.csv, "input CSV")->required();
    dmg->add_option("--config", o.config, "JSON configuration file (defaults when omitted)");
    dmg->add_option("--out", o.damage_out, "directory for damage.json and psd.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*syn) {
            return cmd_synthesize(o);
        }
        if (*sim) {
            return cmd_simulate(o);
        }
        if (*mc) {
            return cmd_montecarlo(o);
        }
        return cmd_damage(o);
    } catch (const InfeasibleError& e) {
        std::cerr << "relcon: " << e.what() << "\n";
        return kInfeasible;
    } catch (const Error& e) {
        std::cerr << "relcon: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Infeasible: return kInfeasible;
            case ErrorKind::Numerical: return kNumerical;
            default: break;
        }
        std::cerr << "usage: relcon {synthesize|simulate|montecarlo|damage} [--config PATH] ...; see relcon --help\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "relcon: " << e.what() << "\n";
        return kNumerical;
    }
}
