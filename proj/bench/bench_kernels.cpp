// Serial reference vs OpenMP path for the three parallel kernels.
#include <benchmark/benchmark.h>

#include "craterid/montecarlo.hpp"

using namespace craterid;

namespace {

const std::vector<CraterRecord>& catalog() {
    static const std::vector<CraterRecord> c = [] {
        SynthCatalogConfig cfg;
        cfg.n_local = 5000;
        cfg.n_regional = 300;
        return synth_catalog(cfg);
    }();
    return c;
}

void BM_enumerate(benchmark::State& st) {
    const IndexScale s = local_scale();
    const auto recs = filter_catalog(catalog(), s);
    const Exec e = st.range(0) ? Exec::parallel : Exec::serial;
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_triads(recs, s, e).size());
}
BENCHMARK(BM_enumerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_jaccard(benchmark::State& st) {
    const Mat3 a = ellipse_to_conic({3.0, 2.0, 0.0, 0.0, 0.3});
    const Mat3 b = ellipse_to_conic({2.5, 1.5, 1.2, -0.4, 1.1});
    const Exec e = st.range(0) ? Exec::parallel : Exec::serial;
    for (auto _ : st) benchmark::DoNotOptimize(jaccard_distance(a, b, 1.0 / 512, e));
}
BENCHMARK(BM_jaccard)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_montecarlo(benchmark::State& st) {
    static const IndexScale s = local_scale();
    static const DescriptorIndex idx = build_index(filter_catalog(catalog(), s), s);
    static const SceneCatalog scene = make_scene_catalog(catalog(), s.d_min, s.d_max);
    MonteCarloConfig cfg;
    cfg.trials = 8;
    cfg.noise_px = 0.5;
    const Exec e = st.range(0) ? Exec::parallel : Exec::serial;
    for (auto _ : st) benchmark::DoNotOptimize(run_monte_carlo(cfg, scene, {&idx}, e).correct);
}
BENCHMARK(BM_montecarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
