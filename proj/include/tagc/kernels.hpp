#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `serial::` and an OpenMP version in `parallel::` that must return
// identical results; tests/test_kernels.cpp holds them to that.

#include <cstdint>
#include <span>
#include <vector>

#include "tagc/graph.hpp"

namespace tagc::kernels {

// Rows centered on their own mean and scaled to unit norm, so that the
// Pearson correlation of rows i and j is the dot product of z_i and z_j.
// Rows with zero variance are flagged invalid and excluded from rankings.
struct CenteredRows {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> z;
  std::vector<std::uint8_t> valid;

  std::span<const double> row(std::size_t i) const { return {z.data() + i * dim, dim}; }
};

CenteredRows center_rows(std::span<const double> data, std::size_t rows, std::size_t dim);

struct Scored {
  NodeId id;
  double score;
};

// Ranking key: similarity quantized to 1e-12 so numerically equal
// correlations compare equal and fall through to the id tie-break.
std::int64_t score_key(double score);

// True when a ranks strictly before b (higher score, then lower id).
inline bool ranks_before(std::int64_t key_a, NodeId a, std::int64_t key_b, NodeId b) {
  return key_a != key_b ? key_a > key_b : a < b;
}

// Per-source top-k lists, each sorted best first. Invalid rows get an
// empty list and never appear in any list.
using TopK = std::vector<std::vector<Scored>>;

// Multi-target BFS result for one background node: (target, hops) sorted
// by target id.
using MssEntries = std::vector<std::pair<NodeId, std::uint32_t>>;

namespace serial {
TopK knn_topk(const CenteredRows& rows, std::size_t k);
std::vector<MssEntries> mss_all(const WeightedGraph& graph, std::span<const std::uint8_t> is_target,
                                std::span<const NodeId> sources, std::uint32_t cap);
// Merge gain of every edge's singleton endpoints: (2 w / V) log2(V / (d_u + d_v)).
std::vector<double> singleton_merge_gains(const WeightedGraph& graph);
}  // namespace serial

namespace parallel {
TopK knn_topk(const CenteredRows& rows, std::size_t k);
std::vector<MssEntries> mss_all(const WeightedGraph& graph, std::span<const std::uint8_t> is_target,
                                std::span<const NodeId> sources, std::uint32_t cap);
std::vector<double> singleton_merge_gains(const WeightedGraph& graph);

// Approximate top-k via random-hyperplane LSH: candidates sharing a bucket
// in any of `tables` hash tables are re-ranked exactly. Deterministic for a
// given seed.
TopK knn_topk_lsh(const CenteredRows& rows, std::size_t k, std::size_t tables, std::size_t bits,
                  std::uint64_t seed);
}  // namespace parallel

// Fraction of exact top-k neighbors recovered by `approx`.
double topk_recall(const TopK& exact, const TopK& approx);

}  // namespace tagc::kernels
