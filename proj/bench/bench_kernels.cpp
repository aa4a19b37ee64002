// Serial reference vs OpenMP kernels, plus the tree builder end to end.

#include <benchmark/benchmark.h>

#include <random>

#include "tagc/coding_tree.hpp"
#include "tagc/kernels.hpp"

using namespace tagc;

namespace {

std::vector<double> random_rows(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> data(rows * dim);
  for (auto& x : data) x = normal(gen);
  return data;
}

// Roughly `degree` random partners per node.
WeightedGraph random_graph(std::size_t n, std::size_t degree, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Edge> edges;
  edges.reserve(n * degree / 2);
  for (NodeId u = 0; u < n; ++u)
    for (std::size_t k = 0; k < degree / 2; ++k) {
      auto v = static_cast<NodeId>(gen() % n);
      if (v != u) edges.push_back({u, v, 1, EdgeOrigin::Original});
    }
  return WeightedGraph(n, std::move(edges));
}

template <auto Kernel>
void knn(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  auto data = random_rows(rows, 32, 1);
  auto centered = kernels::center_rows(data, rows, 32);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(centered, 10));
  state.SetComplexityN(state.range(0));
}

void knn_lsh(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  auto data = random_rows(rows, 32, 1);
  auto centered = kernels::center_rows(data, rows, 32);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::knn_topk_lsh(centered, 10, 12, 10, 3));
  state.SetComplexityN(state.range(0));
}

template <auto Kernel>
void mss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto g = random_graph(n, 6, 2);
  std::vector<std::uint8_t> is_target(n);
  std::vector<NodeId> sources;
  for (NodeId v = 0; v < n; ++v) {
    is_target[v] = v % 5 == 0;
    if (!is_target[v]) sources.push_back(v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(g, is_target, sources, 2));
  state.SetComplexityN(state.range(0));
}

template <auto Kernel>
void merge_gains(benchmark::State& state) {
  auto g = random_graph(static_cast<std::size_t>(state.range(0)), 10, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(g));
  state.SetComplexityN(state.range(0));
}

void tree_build(benchmark::State& state) {
  auto g = random_graph(static_cast<std::size_t>(state.range(0)), 10, 4);
  for (auto _ : state) {
    auto tree = build_coding_tree(g, {.height = 2});
    benchmark::DoNotOptimize(tree.entropy());
  }
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(knn<kernels::serial::knn_topk>)->Name("knn_topk/serial")->RangeMultiplier(2)->Range(1 << 10, 1 << 13);
BENCHMARK(knn<kernels::parallel::knn_topk>)->Name("knn_topk/parallel")->RangeMultiplier(2)->Range(1 << 10, 1 << 13);
BENCHMARK(knn_lsh)->Name("knn_topk/lsh")->RangeMultiplier(2)->Range(1 << 10, 1 << 13);
BENCHMARK(mss<kernels::serial::mss_all>)->Name("mss_all/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(mss<kernels::parallel::mss_all>)->Name("mss_all/parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(merge_gains<kernels::serial::singleton_merge_gains>)
    ->Name("merge_gains/serial")
    ->RangeMultiplier(4)
    ->Range(1 << 12, 1 << 18);
BENCHMARK(merge_gains<kernels::parallel::singleton_merge_gains>)
    ->Name("merge_gains/parallel")
    ->RangeMultiplier(4)
    ->Range(1 << 12, 1 << 18);
// Random graphs have no community structure; the merge stage degenerates
// towards a caterpillar and the fitted complexity shows it.
BENCHMARK(tree_build)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity();

BENCHMARK_MAIN();
