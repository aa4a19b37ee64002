#pragma once

// Graph builders and independent oracles shared by the unit and
// acceptance suites. Nothing here calls into the code under test beyond
// the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tagc/graph.hpp"

namespace fixtures {

using tagc::Edge;
using tagc::NodeId;
using tagc::WeightedGraph;

inline WeightedGraph make_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v, 1, tagc::EdgeOrigin::Original});
  return WeightedGraph(n, std::move(edges));
}

inline WeightedGraph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

// Two triangles {0,1,2}, {3,4,5} joined by the bridge 2-3.
inline WeightedGraph barbell() {
  return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
}

inline WeightedGraph two_triangles() {
  return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

inline WeightedGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(gen)) pairs.emplace_back(u, v);
  return make_graph(n, pairs);
}

// Planted partition: node i belongs to block i % blocks.
struct Sbm {
  WeightedGraph graph;
  std::vector<int> block;
};

inline Sbm planted_partition(std::size_t n, int blocks, double p_in, double p_out, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Sbm out;
  out.block.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.block[i] = static_cast<int>(i % blocks);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (unit(gen) < (out.block[u] == out.block[v] ? p_in : p_out)) pairs.emplace_back(u, v);
  out.graph = make_graph(n, pairs);
  return out;
}

// ---- Oracles -------------------------------------------------------------

inline std::vector<double> degrees_of(const WeightedGraph& g) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (const auto& e : g.edges()) {
    d[e.u] += static_cast<double>(e.w);
    d[e.v] += static_cast<double>(e.w);
  }
  return d;
}

inline double h1_oracle(const WeightedGraph& g) {
  auto d = degrees_of(g);
  double vol = std::accumulate(d.begin(), d.end(), 0.0);
  double h = 0.0;
  for (double x : d)
    if (x > 0) h -= x / vol * std::log2(x / vol);
  return h;
}

// Entropy of the height-2 tree root -> blocks -> leaves, summed term by term
// straight from the edge list.
inline double two_level_oracle(const WeightedGraph& g, const std::vector<int>& block_of) {
  auto d = degrees_of(g);
  const double vol = std::accumulate(d.begin(), d.end(), 0.0);
  std::map<int, double> bvol, bcut;
  for (std::size_t v = 0; v < d.size(); ++v) bvol[block_of[v]] += d[v];
  for (const auto& e : g.edges())
    if (block_of[e.u] != block_of[e.v]) {
      bcut[block_of[e.u]] += static_cast<double>(e.w);
      bcut[block_of[e.v]] += static_cast<double>(e.w);
    }
  double h = 0.0;
  for (auto& [b, gb] : bcut)
    if (gb > 0) h -= gb / vol * std::log2(bvol[b] / vol);
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] > 0) h -= d[v] / vol * std::log2(d[v] / bvol[block_of[v]]);
  return h;
}

// Enumerates every set partition of {0..n-1} as restricted growth strings.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      fn(a);
      return;
    }
    for (int b = 0; b <= max_label + 1; ++b) {
      a[i] = b;
      rec(i + 1, std::max(max_label, b));
    }
  };
  if (n == 0) return;
  a[0] = 0;
  rec(1, 0);
}

struct BestPartition {
  double entropy = 1e300;
  std::vector<int> blocks;
};

inline BestPartition brute_force_two_level(const WeightedGraph& g) {
  BestPartition best;
  for_each_partition(g.num_nodes(), [&](const std::vector<int>& p) {
    double h = two_level_oracle(g, p);
    if (h < best.entropy - 1e-12) {
      best.entropy = h;
      best.blocks = p;
    }
  });
  return best;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }
  std::size_t components() {
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < parent_.size(); ++i) roots.insert(find(i));
    return roots.size();
  }

 private:
  std::vector<std::size_t> parent_;
};

// All-pairs hop distances; unreachable = large.
inline std::vector<std::vector<int>> floyd_warshall(const WeightedGraph& g) {
  const std::size_t n = g.num_nodes();
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Blocks as a comparable canonical form: sorted list of sorted member sets.
inline std::vector<std::vector<NodeId>> canonical_blocks(const std::vector<int>& block_of) {
  std::map<int, std::vector<NodeId>> m;
  for (std::size_t v = 0; v < block_of.size(); ++v) m[block_of[v]].push_back(static_cast<NodeId>(v));
  std::vector<std::vector<NodeId>> out;
  for (auto& [b, members] : m) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

// Simple random TAG over a given topology with a random target mask.
inline tagc::TagGraph random_tag(const WeightedGraph& topology, double target_fraction, std::uint64_t seed,
                                 std::size_t feature_dim = 0, int labels = 3) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution is_target(target_fraction);
  std::normal_distribution<double> normal(0.0, 1.0);
  tagc::TagGraph g;
  for (std::size_t i = 0; i < topology.num_nodes(); ++i) {
    tagc::Node n;
    n.id = static_cast<NodeId>(i);
    n.external_id = static_cast<std::int64_t>(i);
    n.text = "node " + std::to_string(i) + " text";
    n.label = "L" + std::to_string(gen() % labels);
    n.role = is_target(gen) ? tagc::Role::Target : tagc::Role::Background;
    for (std::size_t m = 0; m < feature_dim; ++m) n.feature.push_back(normal(gen));
    g.nodes.push_back(std::move(n));
  }
  g.feature_dim = feature_dim;
  g.topology = topology;
  return g;
}

}  // namespace fixtures
