#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "relcon/fatigue.hpp"
#include "relcon/plant.hpp"
#include "relcon/spectral.hpp"
#include "relcon/synthesis.hpp"
#include "relcon/thermal.hpp"

using namespace relcon;

namespace {

std::vector<double> walk(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> x(n);
    double v = 400.0;
    for (auto& s : x) {
        s = (v += d(rng));
    }
    return x;
}

void BM_Rainflow(benchmark::State& state) {
    const auto x = walk(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rainflow(x, 1e-3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rainflow)->Arg(10'000)->Arg(600'000);

void BM_SimulateLti(benchmark::State& state) {
    const auto ss = realize(TransferFunction({1.0, 2.0, 3.0}, {1.0, 4.0, 6.0, 4.0, 1.0}));
    const auto u = walk(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_lti(ss, u, 1e-3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateLti)->Arg(600'000);

void BM_JunctionTemperature(benchmark::State& state) {
    const auto i = walk(600'000);
    const auto net = FosterNetwork::defaults();
    for (auto _ : state) {
        benchmark::DoNotOptimize(junction_temperature(i, LossParams{}, net, 1e-3));
    }
}
BENCHMARK(BM_JunctionTemperature);

void BM_WelchPsd(benchmark::State& state) {
    const auto x = walk(600'000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_psd(x, 1e-3, 1 << 14));
    }
}
BENCHMARK(BM_WelchPsd);

// One gamma evaluation: closed loop of a fixed controller on the 2000-point grid.
void BM_GammaEvaluation(benchmark::State& state) {
    const auto plant = decoupled_plant(PlantParams{});
    const Controller k{TransferFunction({300.0, 30000.0}, {1.0, 0.0}), std::nullopt, ControllerStructure::OneDof};
    const auto w = build_bound_tf(SensitivityBound::reliability());
    const auto grid = FrequencyGrid::log_spaced(1e-3, 1e6, 2000);
    for (auto _ : state) {
        const auto cl = closed_loop(plant, k);
        const TransferFunction weighted(poly::mul(cl.sensitivity.num(), w.den()),
                                        poly::mul(cl.sensitivity.den(), w.num()));
        benchmark::DoNotOptimize(hinf_norm_on_grid(weighted, grid));
    }
}
BENCHMARK(BM_GammaEvaluation);

void BM_Synthesize(benchmark::State& state) {
    const auto plant = decoupled_plant(PlantParams{});
    SynthesisOptions opt;
    opt.restarts = 1;
    opt.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize(plant, SensitivityBound::performance(), opt));
    }
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
