#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tagc/enhance.hpp"
#include "tagc/graph.hpp"

namespace tagc {

using CommunityId = std::uint32_t;
inline constexpr CommunityId kNoCommunity = std::numeric_limits<CommunityId>::max();

struct TreeCommunity {
  CommunityId id = kNoCommunity;
  CommunityId parent = kNoCommunity;
  std::vector<CommunityId> children;
  double g = 0.0;    // weight of edges leaving the vertex set
  double vol = 0.0;  // sum of weighted degrees in the vertex set
  bool alive = true;

  bool is_leaf() const { return children.empty(); }
};

// Rooted hierarchy over the vertices of a graph. Leaf i is vertex i; the
// root starts as community n. The tree keeps a running total of its
// structural entropy that every edit updates in O(1).
//
// The tree refers to the graph it was built from, which must outlive it.
class CodingTree {
 public:
  // Height-1 tree: every vertex is a leaf directly under the root.
  explicit CodingTree(const WeightedGraph& graph);
  explicit CodingTree(WeightedGraph&&) = delete;

  const WeightedGraph& graph() const { return *graph_; }
  CommunityId root() const { return root_; }
  const TreeCommunity& community(CommunityId id) const { return nodes_.at(id); }
  std::size_t arena_size() const { return nodes_.size(); }
  std::vector<CommunityId> alive_ids() const;
  std::size_t num_leaves() const { return num_leaves_; }

  int height() const;
  int depth(CommunityId id) const;
  // Sorted vertices under `id`.
  std::vector<NodeId> vertex_set(CommunityId id) const;
  bool is_root_child(CommunityId id) const;

  // Maintained incrementally.
  double entropy() const;
  // Full recomputation from cached g and vol.
  double recompute_entropy() const;
  // Contribution of one non-root community: -(g / vol(G)) log2(vol / vol(parent)).
  double term(CommunityId id) const;

  // Entropy reduction of merging two root children; positive is better.
  double merge_delta(CommunityId a, CommunityId b) const;
  // Creates a new root child with `a` and `b` as its children.
  CommunityId apply_merge(CommunityId a, CommunityId b);

  // Entropy increase of removing an internal non-root community.
  double drop_cost(CommunityId id) const;
  void apply_drop(CommunityId id);

  // Summed terms from `descendant` up to, but excluding, `ancestor`.
  double deduction_se(CommunityId ancestor, CommunityId descendant) const;

  // Inserts single-child communities above shallow leaves until every leaf
  // sits at depth `h`. Entropy is unchanged.
  void pad_leaves(int h);

  // Rechecks cached g/vol against the graph and the running entropy against
  // a full recomputation; throws ValidationError on any mismatch.
  void audit(double tolerance = 1e-9) const;

 private:
  friend class TreeBuilder;

  double graph_volume() const { return graph_->volume(); }
  void require_root_children(CommunityId a, CommunityId b) const;
  CommunityId merge_with_cut(CommunityId a, CommunityId b, double cut_weight);
  double sum_child_g(CommunityId id) const;

  const WeightedGraph* graph_;
  std::vector<TreeCommunity> nodes_;
  CommunityId root_;
  std::size_t num_leaves_;
  double entropy_ = 0.0;
};

struct TreeBuildOptions {
  int height = 2;
  // Construction is fully deterministic; the seed is recorded for the run
  // manifest only.
  std::uint64_t seed = 0;
  bool audit = false;
};

struct TreeBuildStats {
  std::size_t merges = 0;
  std::size_t drops = 0;
  // Merge gains and drop costs computed, including stale heap entries.
  std::size_t candidate_evaluations = 0;
  int height_after_merge = 1;
  double entropy_one_dim = 0.0;
  double entropy_after_merge = 0.0;
  double entropy_final = 0.0;
};

// Greedy construction: merge the best connected pair of root children
// while the gain is positive, then drop the cheapest internal community
// until the height fits, then pad shallow leaves to depth `height`.
CodingTree build_coding_tree(const WeightedGraph& graph, const TreeBuildOptions& opts = {},
                             TreeBuildStats* stats = nullptr);
CodingTree build_coding_tree(WeightedGraph&&, const TreeBuildOptions& = {}, TreeBuildStats* = nullptr) = delete;
inline CodingTree build_coding_tree(const EnhancedGraph& graph, const TreeBuildOptions& opts = {},
                                    TreeBuildStats* stats = nullptr) {
  return build_coding_tree(graph.graph, opts, stats);
}

struct Community {
  std::uint32_t id = 0;
  std::vector<NodeId> members;  // sorted
};

// Leaves grouped by their parent. A leaf hanging directly off the root
// forms its own singleton community. Ids are assigned 0..m-1 in order of
// smallest member.
std::vector<Community> finest_partition(const CodingTree& tree);

}  // namespace tagc
