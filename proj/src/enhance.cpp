#include "tagc/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "tagc/error.hpp"

namespace tagc {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void check_k(const TagGraph& graph, std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  if (k >= graph.size())
    throw ValidationError("k = " + std::to_string(k) + " must be below |V| = " + std::to_string(graph.size()));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: dimension mismatch");
  if (x.size() < 2) throw ValidationError("pearson: dimension must be >= 2");
  const double d = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    mx += x[m];
    my += y[m];
  }
  mx /= d;
  my /= d;
  const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (x_const || y_const) throw NoVariance();
  double num = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double a = x[m] - mx, b = y[m] - my;
    num += a * b;
    sx += a * a;
    sy += b * b;
  }
  if (sx <= 0.0 || sy <= 0.0) throw NoVariance();
  return std::clamp(num / (std::sqrt(sx) * std::sqrt(sy)), -1.0, 1.0);
}

kernels::TopK similarity_topk(const TagGraph& graph, std::size_t k, const SimilarityOptions& opts) {
  graph.require_features();
  check_k(graph, k);
  std::vector<double> data;
  data.reserve(graph.size() * graph.feature_dim);
  for (const auto& n : graph.nodes) data.insert(data.end(), n.feature.begin(), n.feature.end());
  auto rows = kernels::center_rows(data, graph.size(), graph.feature_dim);
  if (graph.size() < opts.exact_threshold) return kernels::parallel::knn_topk(rows, k);
  return kernels::parallel::knn_topk_lsh(rows, k, opts.lsh_tables, opts.lsh_bits, opts.seed);
}

namespace {

std::vector<Edge> symmetrize_prefix(const kernels::TopK& topk, std::size_t k) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> out;
  for (std::size_t i = 0; i < topk.size(); ++i) {
    const auto& list = topk[i];
    for (std::size_t r = 0; r < std::min(k, list.size()); ++r) {
      const NodeId j = list[r].id;
      if (seen.insert(pair_key(static_cast<NodeId>(i), j)).second)
        out.push_back({std::min<NodeId>(i, j), std::max<NodeId>(i, j), 1, EdgeOrigin::Knn});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return out;
}

double entropy_of(std::span<const Weight> degree, Weight total_weight) {
  if (total_weight <= 0) throw ValidationError("one-dimensional entropy needs at least one edge");
  const double vol = 2.0 * static_cast<double>(total_weight);
  double h = 0.0;
  for (Weight d : degree) {
    if (d <= 0) continue;
    const double p = static_cast<double>(d) / vol;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

std::vector<Edge> knn_candidate_edges(const TagGraph& graph, std::size_t k, const SimilarityOptions& opts) {
  return symmetrize_prefix(similarity_topk(graph, k, opts), k);
}

double one_dim_se(const WeightedGraph& graph) { return entropy_of(graph.degrees(), graph.total_weight()); }

KSelection select_k(const TagGraph& graph, std::size_t k_max, double epsilon, const SimilarityOptions& opts) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const auto topk = similarity_topk(graph, k_max, opts);

  std::unordered_set<std::uint64_t> present;
  present.reserve(graph.topology.num_edges() * 2 + graph.size() * k_max);
  for (const auto& e : graph.topology.edges()) present.insert(pair_key(e.u, e.v));
  std::vector<Weight> degree(graph.topology.degrees().begin(), graph.topology.degrees().end());
  Weight total = graph.topology.total_weight();

  KSelection sel;
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t i = 0; i < topk.size(); ++i) {
      if (topk[i].size() < k) continue;
      const NodeId j = topk[i][k - 1].id;
      if (present.insert(pair_key(static_cast<NodeId>(i), j)).second) {
        ++degree[i];
        ++degree[j];
        ++total;
      }
    }
    sel.entropy.push_back(entropy_of(degree, total));
  }
  sel.k_m = k_max;
  for (std::size_t k = 1; k < k_max; ++k) {
    const double gain = (sel.entropy[k] - sel.entropy[k - 1]) / sel.entropy[k - 1];
    if (gain < epsilon) {
      sel.k_m = k;
      break;
    }
  }
  return sel;
}

std::size_t EnhancedGraph::augmented_edges() const {
  return static_cast<std::size_t>(std::count_if(graph.edges().begin(), graph.edges().end(),
                                                [](const Edge& e) { return e.origin == EdgeOrigin::Knn; }));
}

std::vector<Edge> EnhancedGraph::knn_edges() const {
  std::vector<Edge> out;
  for (const auto& e : graph.edges())
    if (e.origin == EdgeOrigin::Knn) out.push_back(e);
  return out;
}

EnhancedGraph EnhancedGraph::unchanged(const TagGraph& base) {
  return EnhancedGraph{&base, base.topology, 0};
}

EnhancedGraph enhance(const TagGraph& graph, std::size_t k_m, const SimilarityOptions& opts) {
  auto knn = knn_candidate_edges(graph, k_m, opts);
  std::unordered_set<std::uint64_t> original;
  original.reserve(graph.topology.num_edges() * 2);
  for (const auto& e : graph.topology.edges()) original.insert(pair_key(e.u, e.v));
  std::vector<Edge> all(graph.topology.edges().begin(), graph.topology.edges().end());
  for (const auto& e : knn)
    if (!original.count(pair_key(e.u, e.v))) all.push_back(e);
  return EnhancedGraph{&graph, WeightedGraph(graph.size(), std::move(all)), k_m};
}

}  // namespace tagc
