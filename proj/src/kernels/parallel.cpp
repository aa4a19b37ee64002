#include <omp.h>

#include <random>
#include <unordered_map>

#include "common.hpp"

namespace tagc::kernels::parallel {

TopK knn_topk(const CenteredRows& rows, std::size_t k) {
  TopK out(rows.rows);
  const auto n = static_cast<std::int64_t>(rows.rows);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) out[i] = detail::topk_for_row(rows, static_cast<std::size_t>(i), k);
  return out;
}

std::vector<MssEntries> mss_all(const WeightedGraph& graph, std::span<const std::uint8_t> is_target,
                                std::span<const NodeId> sources, std::uint32_t cap) {
  std::vector<MssEntries> out(sources.size());
  const auto n = static_cast<std::int64_t>(sources.size());
#pragma omp parallel
  {
    detail::CappedBfs bfs(graph.num_nodes());
#pragma omp for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < n; ++i) out[i] = bfs.run(graph, is_target, sources[i], cap);
  }
  return out;
}

std::vector<double> singleton_merge_gains(const WeightedGraph& graph) {
  const auto edges = graph.edges();
  std::vector<double> out(edges.size());
  const double vol = graph.volume();
  const auto m = static_cast<std::int64_t>(edges.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t e = 0; e < m; ++e) {
    const double merged = static_cast<double>(graph.degree(edges[e].u) + graph.degree(edges[e].v));
    out[e] = detail::merge_gain(static_cast<double>(edges[e].w), merged, vol);
  }
  return out;
}

TopK knn_topk_lsh(const CenteredRows& rows, std::size_t k, std::size_t tables, std::size_t bits,
                  std::uint64_t seed) {
  const std::size_t n = rows.rows, d = rows.dim;
  // Hyperplanes drawn from a fixed-seed Gaussian; sign patterns become bucket keys.
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> planes(tables * bits * d);
  for (auto& p : planes) p = normal(gen);

  std::vector<std::vector<std::uint64_t>> codes(tables, std::vector<std::uint64_t>(n, 0));
  const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sn; ++i) {
    if (!rows.valid[i]) continue;
    const double* zi = rows.z.data() + i * d;
    for (std::size_t t = 0; t < tables; ++t) {
      std::uint64_t code = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (detail::dot(zi, planes.data() + (t * bits + b) * d, d) >= 0.0) code |= (1ull << b);
      }
      codes[t][i] = code;
    }
  }
  std::vector<std::unordered_map<std::uint64_t, std::vector<NodeId>>> buckets(tables);
  for (std::size_t t = 0; t < tables; ++t)
    for (std::size_t i = 0; i < n; ++i)
      if (rows.valid[i]) buckets[t][codes[t][i]].push_back(static_cast<NodeId>(i));

  TopK out(n);
#pragma omp parallel
  {
    std::vector<std::uint32_t> seen(n, 0);
    std::uint32_t epoch = 0;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < sn; ++i) {
      if (!rows.valid[i]) continue;
      ++epoch;
      detail::TopList list(k);
      const double* zi = rows.z.data() + i * d;
      for (std::size_t t = 0; t < tables; ++t) {
        // Probe the home bucket and every bucket one bit away.
        for (std::size_t flip = 0; flip <= bits; ++flip) {
          std::uint64_t code = codes[t][i];
          if (flip < bits) code ^= (1ull << flip);
          auto it = buckets[t].find(code);
          if (it == buckets[t].end()) continue;
          for (NodeId j : it->second) {
            if (j == static_cast<NodeId>(i) || seen[j] == epoch) continue;
            seen[j] = epoch;
            list.offer(j, detail::dot(zi, rows.z.data() + j * d, d));
          }
        }
      }
      out[i] = list.take();
    }
  }
  return out;
}

}  // namespace tagc::kernels::parallel
