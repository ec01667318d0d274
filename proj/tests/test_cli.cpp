#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relcon/io.hpp"
#include "relcon/special.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& root() {
    static const fs::path r = [] {
        const fs::path p = fs::temp_directory_path() / "relcon_test_cli";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return r;
}

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Run cli(const std::string& args) {
    static int n = 0;
    const fs::path o = root() / ("stdout_" + std::to_string(n));
    const fs::path e = root() / ("stderr_" + std::to_string(n++));
    const std::string cmd = std::string(RELCON_CLI_PATH) + " " + args + " > " + o.string() + " 2> " + e.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

fs::path write_config(const std::string& name, const json& j) {
    const fs::path p = root() / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

// quick synthesis and a 20 s reference keep each run to a few seconds
json short_config() {
    return {{"synthesis", {{"restarts", 2}}},
            {"reference", {{"duration_s", 20.0}, {"bandwidth_rad_s", 10.0}, {"seed", 5}}}};
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("--help").code == 0);

    const auto missing = cli("synthesize --config " + (root() / "nope.json").string());
    CHECK(missing.code == 1);
    CHECK(missing.err.find("not found") != std::string::npos);

    const auto bad = write_config("bad.json", {{"plant", {{"inductanse_H", 1e-3}}}});
    const auto r = cli("simulate --config " + bad.string());
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown key 'plant.inductanse_H'") != std::string::npos);

    const auto neg = write_config("neg.json", {{"plant", {{"inductance_H", -1.0}}}});
    CHECK(cli("synthesize --config " + neg.string()).code == 1);
}

TEST_CASE("synthesize with shipped defaults") {
    for (const std::string design : {"performance", "reliability"}) {
        const fs::path out = root() / ("syn_" + design);
        const auto r = cli("synthesize --design " + design + " --svg --out " + out.string());
        REQUIRE(r.code == 0);
        CHECK(r.out.find("design=" + design) != std::string::npos);
        CHECK(r.out.find("feasible=true") != std::string::npos);
        const json j = json::parse(slurp(out / ("controller_" + design + ".json")));
        CHECK(j["gamma"].get<double>() <= 1.0);
        CHECK(j["stable"].get<bool>());
        CHECK(j["design"] == design);
        const std::string bode = slurp(out / ("bode_" + design + ".csv"));
        CHECK(bode.rfind("omega_rad_s,abs_S,bound,abs_Tr\n", 0) == 0);
        CHECK(slurp(out / ("bode_" + design + ".svg")).rfind("<svg", 0) == 0);
    }
}

TEST_CASE("infeasible bound exits 2") {
    json cfg = short_config();
    cfg["bounds"] = {{"performance", {{"peak", 0.5}}}};
    const auto r = cli("synthesize --config " + write_config("tight.json", cfg).string() + " --out " +
                          (root() / "tight").string());
    CHECK(r.code == 2);
    CHECK(r.out.find("feasible=false") != std::string::npos);
    CHECK_FALSE(fs::exists(root() / "tight" / "controller_performance.json"));
}

TEST_CASE("simulate is deterministic and feeds the damage command") {
    const auto cfg = write_config("short.json", short_config());
    const fs::path a = root() / "sim_a", b = root() / "sim_b";
    REQUIRE(cli("simulate --design reliability --seed 9 --config " + cfg.string() + " --out " + a.string()).code ==
            0);
    REQUIRE(cli("simulate --design reliability --seed 9 --threads 1 --config " + cfg.string() + " --out " +
                   b.string())
                .code == 0);
    for (const char* f : {"reference.csv", "current.csv", "tj.csv", "damage.json"}) {
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    const json sim = json::parse(slurp(a / "damage.json"));
    CHECK(sim["seed"] == 9);
    CHECK(sim["samples"] == 20000);
    CHECK(sim["damage_rainflow"].get<double>() > 0.0);

    const auto r = cli("damage " + (a / "tj.csv").string() + " --config " + cfg.string() + " --out " +
                          (root() / "dmg").string());
    REQUIRE(r.code == 0);
    const json d = json::parse(r.out);
    CHECK(d["damage_rainflow"].get<double>() ==
          doctest::Approx(sim["damage_rainflow"].get<double>()).epsilon(1e-9));
    CHECK(d["damage_spectral"].get<double>() ==
          doctest::Approx(sim["damage_spectral"].get<double>()).epsilon(1e-9));
    CHECK(json::parse(slurp(root() / "dmg" / "damage.json")) == d);
    CHECK(slurp(root() / "dmg" / "psd.csv").rfind("omega_rad_s,value\n", 0) == 0);
}

TEST_CASE("zero reference gives a flat junction temperature") {
    json c = short_config();
    c["reference"]["sigma_A"] = 0.0;
    const fs::path out = root() / "flat";
    const auto r = cli("simulate --config " + write_config("flat.json", c).string() + " --out " + out.string());
    REQUIRE(r.code == 0);
    const auto tj = relcon::read_timeseries_csv(out / "tj.csv");
    CHECK(std::all_of(tj.value.begin(), tj.value.end(), [](double t) { return t == 313.15; }));
    const json d = json::parse(slurp(out / "damage.json"));
    CHECK(d["damage_rainflow"] == 0.0);
    CHECK(d["damage_spectral"] == 0.0);
}

TEST_CASE("damage of a synthetic sine") {
    // 20 K amplitude around 423.15 K at 0.1 Hz for 3000 s: 300 cycles of the
    // lifetime anchor, each lasting 10 s.
    const double dt = 0.01;
    std::vector<double> tj(300'001);
    for (std::size_t i = 0; i < tj.size(); ++i) {
        tj[i] = 423.15 + 20.0 * std::sin(2.0 * std::numbers::pi * 0.1 * static_cast<double>(i) * dt);
    }
    const fs::path csv = root() / "sine.csv";
    relcon::atomic_write(csv, relcon::timeseries_csv(tj, dt, "tj_K"));
    const auto r = cli("damage " + csv.string());
    REQUIRE(r.code == 0);
    const json d = json::parse(r.out);
    CHECK(d["damage_rainflow"].get<double>() == doctest::Approx(1e-3).epsilon(0.02));
    // Single-moment damage assumes Rayleigh ranges; for a constant-amplitude
    // sine it exceeds the counted value by Gamma(1 + k/2).
    const double ratio = d["damage_spectral"].get<double>() / d["damage_rainflow"].get<double>();
    MESSAGE("spectral / rainflow = " << ratio);
    CHECK(ratio == doctest::Approx(relcon::lanczos_gamma(3.5)).epsilon(0.05));

    CHECK(cli("damage " + (root() / "absent.csv").string()).code == 1);
    std::ofstream(root() / "broken.csv") << "time_s,x\n0,1\n0.1,zz\n";
    const auto bad = cli("damage " + (root() / "broken.csv").string());
    CHECK(bad.code == 1);
    CHECK(bad.err.find("csv line 3") != std::string::npos);
}

TEST_CASE("montecarlo on a small study") {
    json c = short_config();
    c["study"] = {{"bandwidths_rad_s", {5.0, 10.0}}, {"trials", 2}, {"duration_s", 20.0}};
    const auto cfg = write_config("mc.json", c);
    const fs::path a = root() / "mc_a", b = root() / "mc_b";
    REQUIRE(cli("montecarlo --svg --threads 1 --config " + cfg.string() + " --out " + a.string()).code == 0);
    REQUIRE(cli("montecarlo --threads 3 --config " + cfg.string() + " --out " + b.string()).code == 0);
    const std::string study = slurp(a / "study.csv");
    CHECK(study == slurp(b / "study.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(std::count(study.begin(), study.end(), '\n') == 1 + 2 * 2 * 2);
    const json s = json::parse(slurp(a / "summary.json"));
    CHECK(s["bandwidths"].size() == 2);
    CHECK(fs::exists(a / "damage_vs_bandwidth.svg"));
}
