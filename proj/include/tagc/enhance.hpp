#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tagc/graph.hpp"
#include "tagc/kernels.hpp"

namespace tagc {

// Pearson correlation of two equal-length vectors; throws NoVariance when
// either is constant and ValidationError on a dimension mismatch or d < 2.
double pearson(std::span<const double> x, std::span<const double> y);

struct SimilarityOptions {
  // Exact brute-force search below this many nodes, LSH above.
  std::size_t exact_threshold = 50000;
  std::size_t lsh_tables = 12;
  std::size_t lsh_bits = 10;
  std::uint64_t seed = 0;
};

// Top-k most similar nodes per source, best first, ties by ascending id.
kernels::TopK similarity_topk(const TagGraph& graph, std::size_t k, const SimilarityOptions& opts = {});

// Symmetrized union of every node's top-k list: undirected, weight 1,
// origin Knn, one entry per pair, sorted by (u, v).
std::vector<Edge> knn_candidate_edges(const TagGraph& graph, std::size_t k,
                                      const SimilarityOptions& opts = {});

// Degree-distribution entropy in bits; throws ValidationError on an
// edgeless graph.
double one_dim_se(const WeightedGraph& graph);

struct KSelection {
  std::size_t k_m = 1;
  std::vector<double> entropy;  // entropy[k-1] = H1 of the graph enhanced with k
};

// Smallest k in 1..k_max whose relative H1 gain when moving to k+1 drops
// below epsilon; k_max when the curve never flattens.
KSelection select_k(const TagGraph& graph, std::size_t k_max, double epsilon,
                    const SimilarityOptions& opts = {});

// Base graph plus KNN edges. Edges present in both sets keep their original
// weight and origin; KNN-only edges have weight 1 and origin Knn.
// `base` must outlive the EnhancedGraph.
struct EnhancedGraph {
  const TagGraph* base = nullptr;
  WeightedGraph graph;
  std::size_t k_m = 0;

  std::size_t augmented_edges() const;
  std::vector<Edge> knn_edges() const;

  // No augmentation; used when structure enhancement is switched off.
  static EnhancedGraph unchanged(const TagGraph& base);
};

EnhancedGraph enhance(const TagGraph& graph, std::size_t k_m, const SimilarityOptions& opts = {});

}  // namespace tagc
