#include <benchmark/benchmark.h>

#include "fpp/geodesic.hpp"
#include "fpp/theory.hpp"
#include "fpp/weights.hpp"

namespace {

using namespace fpp;

VertexId target_on_axis(const LatticeBox& box, std::int64_t n) {
    Coords c{};
    c[0] = static_cast<std::int32_t>(n);
    return box.encode_vertex(c);
}

void BM_MaterializeWeights(benchmark::State& state) {
    const auto n = state.range(0);
    const LatticeBox box(2, 4 * n);
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    const Realization real(model, 0);
    std::vector<double> w;
    for (auto _ : state) {
        real.materialize_into(box, w);
        benchmark::DoNotOptimize(w.data());
    }
    state.SetItemsProcessed(state.iterations() * box.edge_count());
}
BENCHMARK(BM_MaterializeWeights)->Arg(16)->Arg(64);

void BM_ShortestPassageValue(benchmark::State& state) {
    const auto n = state.range(0);
    const LatticeBox box(2, 4 * n);
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    std::vector<double> w = Realization(model, 0).materialize(box);
    const VertexId src = box.encode_vertex(origin_coords(2));
    const VertexId tgt = target_on_axis(box, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(shortest_passage_value(box, src, tgt, w, std::nullopt));
    }
}
BENCHMARK(BM_ShortestPassageValue)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_ShortestPassageCanonical(benchmark::State& state) {
    const auto n = state.range(0);
    const LatticeBox box(2, 4 * n);
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    std::vector<double> w = Realization(model, 0).materialize(box);
    const VertexId src = box.encode_vertex(origin_coords(2));
    const VertexId tgt = target_on_axis(box, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(shortest_passage(box, src, tgt, w, std::nullopt).value);
    }
}
BENCHMARK(BM_ShortestPassageCanonical)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_FullReplication(benchmark::State& state) {
    // One Monte Carlo work unit: materialize, plain and truncated queries.
    const auto n = state.range(0);
    const LatticeBox box(2, 4 * n);
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    const VertexId src = box.encode_vertex(origin_coords(2));
    const VertexId tgt = target_on_axis(box, n);
    const Truncation tr{n, default_alpha(2)};
    std::vector<double> w;
    std::uint32_t rep = 0;
    for (auto _ : state) {
        Realization(model, rep++).materialize_into(box, w);
        benchmark::DoNotOptimize(shortest_passage(box, src, tgt, w, std::nullopt).value);
        benchmark::DoNotOptimize(shortest_passage(box, src, tgt, w, tr).value);
    }
}
BENCHMARK(BM_FullReplication)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Beta1(benchmark::State& state) {
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_beta1(model, 2).beta1);
    }
}
BENCHMARK(BM_Beta1);

}  // namespace

BENCHMARK_MAIN();
