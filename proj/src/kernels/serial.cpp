#include <cmath>
#include <unordered_set>

#include "common.hpp"

namespace tagc::kernels {

std::int64_t score_key(double score) { return std::llround(score * 1e12); }

CenteredRows center_rows(std::span<const double> data, std::size_t rows, std::size_t dim) {
  CenteredRows out;
  out.rows = rows;
  out.dim = dim;
  out.z.assign(data.begin(), data.end());
  out.valid.assign(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    double* r = out.z.data() + i * dim;
    double mean = 0.0;
    for (std::size_t m = 0; m < dim; ++m) mean += r[m];
    mean /= static_cast<double>(dim);
    double ss = 0.0;
    for (std::size_t m = 0; m < dim; ++m) {
      r[m] -= mean;
      ss += r[m] * r[m];
    }
    // Relative threshold: a constant row centers to rounding noise only.
    double scale = 0.0;
    for (std::size_t m = 0; m < dim; ++m) scale = std::max(scale, std::abs(r[m] + mean));
    if (ss <= 0.0 || std::sqrt(ss) <= 1e-12 * std::max(scale, 1.0)) continue;
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t m = 0; m < dim; ++m) r[m] *= inv;
    out.valid[i] = 1;
  }
  return out;
}

double topk_recall(const TopK& exact, const TopK& approx) {
  std::size_t total = 0, hit = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    std::unordered_set<NodeId> found;
    if (i < approx.size())
      for (const auto& s : approx[i]) found.insert(s.id);
    for (const auto& s : exact[i]) {
      ++total;
      hit += found.count(s.id);
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

namespace serial {

TopK knn_topk(const CenteredRows& rows, std::size_t k) {
  TopK out(rows.rows);
  for (std::size_t i = 0; i < rows.rows; ++i) out[i] = detail::topk_for_row(rows, i, k);
  return out;
}

std::vector<MssEntries> mss_all(const WeightedGraph& graph, std::span<const std::uint8_t> is_target,
                                std::span<const NodeId> sources, std::uint32_t cap) {
  std::vector<MssEntries> out(sources.size());
  detail::CappedBfs bfs(graph.num_nodes());
  for (std::size_t i = 0; i < sources.size(); ++i) out[i] = bfs.run(graph, is_target, sources[i], cap);
  return out;
}

std::vector<double> singleton_merge_gains(const WeightedGraph& graph) {
  const auto edges = graph.edges();
  std::vector<double> out(edges.size());
  const double vol = graph.volume();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double merged = static_cast<double>(graph.degree(edges[e].u) + graph.degree(edges[e].v));
    out[e] = detail::merge_gain(static_cast<double>(edges[e].w), merged, vol);
  }
  return out;
}

}  // namespace serial
}  // namespace tagc::kernels
