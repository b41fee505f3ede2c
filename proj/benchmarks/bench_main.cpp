#include "isoperc/isoradial.hpp"
#include "isoperc/percsim.hpp"
#include "isoperc/rcm.hpp"
#include "isoperc/startriangle.hpp"
#include "isoperc/tiling.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <numbers>

using namespace isoperc;

namespace {

const IsoradialGraph& square_graph(int size) {
    static std::map<int, IsoradialGraph> cache;
    auto it = cache.find(size);
    if (it == cache.end()) it = cache.emplace(size, build_isoradial(periodic_tiling(PeriodicKind::Square, size), 0)).first;
    return it->second;
}

void BM_PenroseTiling(benchmark::State& state) {
    const double size = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(penrose_tiling(size));
}
BENCHMARK(BM_PenroseTiling)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BuildIsoradial(benchmark::State& state) {
    const auto tiling = periodic_tiling(PeriodicKind::Square, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_isoradial(tiling, 0));
}
BENCHMARK(BM_BuildIsoradial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ClusterDecomposition(benchmark::State& state) {
    const auto& g = square_graph(static_cast<int>(state.range(0)));
    const auto w = percolation_weights(g, 1.0);
    Rng rng(1);
    std::vector<std::uint8_t> open;
    for (auto _ : state) {
        sample_open(w, rng, open);
        benchmark::DoNotOptimize(cluster_decomposition(g, open));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_ClusterDecomposition)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BoxCrossing(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto& g = square_graph(2 * n + 16);
    const auto w = percolation_weights(g, 1.0);
    const CrossingSpec spec{square_lattice_box({n + 8.0, n + 8.0}, n, n + 1), CrossingDirection::Horizontal};
    const BoxCrossing crossing(g, spec);
    std::vector<std::uint8_t> open(crossing.edge_count());
    Rng rng(2);
    for (auto _ : state) {
        for (std::size_t k = 0; k < open.size(); ++k) open[k] = rng.uniform() < w.p[crossing.graph_edge(k)];
        benchmark::DoNotOptimize(crossing.crosses(open));
    }
}
BENCHMARK(BM_BoxCrossing)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_HeatBathSweep(benchmark::State& state) {
    const auto& g = square_graph(static_cast<int>(state.range(0)));
    HeatBath chain(g, RCParams::uniform(g.edge_count(), rc_critical_p(4.0), 4.0), BoundaryCondition::free());
    Rng rng(3);
    for (int i = 0; i < 20; ++i) chain.sweep(rng);
    for (auto _ : state) chain.sweep(rng);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_HeatBathSweep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SpacetimeSample(benchmark::State& state) {
    const SpacetimeSpec spec{std::numbers::pi / 4, static_cast<double>(state.range(0)), {0, 0}};
    Rng rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(spacetime_crossing_sample(spec, rng));
}
BENCHMARK(BM_SpacetimeSample)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_StarTriangleVerify(benchmark::State& state) {
    const auto params = TriangleParams::canonical_random_cluster({2.0, 2.2, 2 * std::numbers::pi - 4.2}, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(verify_equivalence(params, 1e-10));
}
BENCHMARK(BM_StarTriangleVerify);

} // namespace
BENCHMARK_MAIN();
