#include <benchmark/benchmark.h>

#include "fracprice/calibration.hpp"
#include "fracprice/green.hpp"
#include "fracprice/hedging.hpp"
#include "fracprice/pricing.hpp"
#include "fracprice/specfun.hpp"

using namespace fracprice;

static void BM_MittagLeffler(benchmark::State& state) {
    double z = -0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mittag_leffler(0.9, 1.0, cplx(z, 0.0)));
        z = z < -20.0 ? -0.5 : z - 0.37;
    }
}
BENCHMARK(BM_MittagLeffler);

static void BM_GreenUnit(benchmark::State& state) {
    const GreenFunction g(DiffusionSpec{1.6, 1.05, DerivativeKind::Caputo, 1.0});
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.unit(x));
        x = x > 8.0 ? -8.0 : x + 0.173;
    }
}
BENCHMARK(BM_GreenUnit);

static void BM_GreenSetup(benchmark::State& state) {
    for (auto _ : state) {
        GreenFunction g(DiffusionSpec{1.6, 1.05, DerivativeKind::Caputo, 1.0});
        benchmark::DoNotOptimize(g.unit_origin());
    }
}
BENCHMARK(BM_GreenSetup);

static void BM_TerminalMeasure(benchmark::State& state) {
    const DiffusionSpec spec{1.6, 1.05, DerivativeKind::Caputo, 1.0};
    for (auto _ : state) {
        TerminalMeasure m(spec, 0.5);
        benchmark::DoNotOptimize(m.total_mass());
    }
}
BENCHMARK(BM_TerminalMeasure)->Unit(benchmark::kMillisecond);

static void BM_PriceLadder(benchmark::State& state) {
    const DiffusionSpec spec{1.6, 1.05, DerivativeKind::Caputo, 0.15};
    const DfPricer pricer(spec, 1000.0, 0.01, 0.02, {0.25});
    for (auto _ : state) {
        double s = 0.0;
        for (int k = 0; k < 50; ++k) s += pricer.price(OptionSide::Call, 900.0 + 4.0 * k, 0.25).value;
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_PriceLadder);

static void BM_CalibrationObjective(benchmark::State& state) {
    MarketSnapshot snap{"2008-11-03", 1000.0, 0.01, 0.02, {}};
    for (double tau : {1.0 / 12.0, 0.25, 0.5, 1.0})
        for (int j = 1; j <= 7; ++j) {
            snap.quotes.push_back({OptionSide::Put, 1000.0 - 20.0 * j, tau, 1.0});
            snap.quotes.push_back({OptionSide::Call, 1000.0 + 20.0 * j, tau, 1.0});
        }
    ModelParams p{1.6, 1.05, 0.15};
    for (auto _ : state) {
        p.sigma = p.sigma == 0.15 ? 0.1500001 : 0.15;
        benchmark::DoNotOptimize(aggregated_error(ModelKind::df(), p, snap));
    }
}
BENCHMARK(BM_CalibrationObjective)->Unit(benchmark::kMillisecond);

static void BM_OptimalPhi(benchmark::State& state) {
    HedgeInput inp;
    inp.spec = DiffusionSpec{1.6, 1.05, DerivativeKind::Caputo, 0.15};
    inp.S0 = inp.K = 1000.0;
    inp.tau = 0.25;
    for (auto _ : state) benchmark::DoNotOptimize(optimal_phi(inp));
}
BENCHMARK(BM_OptimalPhi)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
