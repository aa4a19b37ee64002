#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagc/community.hpp"
#include "tagc/enhance.hpp"
#include "tagc/graph.hpp"

namespace tagc {

// One group of background nodes replaced by a single node. With
// `fold_into` set the group is absorbed into that target instead and its
// summary becomes part of the target's context.
struct CondenseGroup {
  std::uint32_t source_id = 0;  // community or class id, kept for provenance
  std::vector<NodeId> members;  // background nodes only
  std::string summary;
  std::optional<NodeId> fold_into;
};

struct CondensedNode {
  NodeId id = 0;  // >= number of original nodes
  std::uint32_t source_id = 0;
  std::string summary;
  std::vector<NodeId> members;  // sorted original ids
  double boundary_weight = 0.0;  // edges from members to anything outside the group
  double absorbed_weight = 0.0;  // edges between two members
  double consolidated_degree = 0.0;  // sum of member degrees
};

struct CompressedGraph {
  std::size_t original_nodes = 0;
  std::vector<NodeId> targets;  // original ids, ascending
  std::vector<CondensedNode> condensed;
  // Endpoints use target ids and condensed ids; sorted by (u, v).
  std::vector<Edge> edges;
  // Weight absorbed at each surviving node from edges whose endpoints both
  // mapped onto it.
  std::map<NodeId, double> absorbed;
  // Extra context folded into a target.
  std::map<NodeId, std::string> context_suffix;
  double dropped_weight = 0.0;
  std::size_t dropped_edges = 0;
  std::vector<NodeId> dropped_nodes;  // sorted

  std::size_t num_nodes() const { return targets.size() + condensed.size(); }
  bool is_condensed(NodeId id) const { return id >= original_nodes; }
  const CondensedNode& condensed_node(NodeId id) const { return condensed.at(id - original_nodes); }
  double total_edge_weight() const;
  double total_absorbed() const;

  // Adjacency over all ids < original_nodes + condensed.size().
  WeightedGraph adjacency() const;
};

// Maps every edge of `graph` through the group assignment: target
// endpoints stay, grouped backgrounds move to their group node (or fold
// target), ungrouped backgrounds are dropped along with their edges.
// Groups must be disjoint and contain only background nodes.
CompressedGraph condense(const WeightedGraph& graph, const TagGraph& tag, std::span<const CondenseGroup> groups);

// Communities holding at least one target.
std::vector<TypedCommunity> retain_communities(std::span<const TypedCommunity> typed);

// `retained` together with the discarded communities must cover every node;
// summaries are required for each retained community with a background.
CompressedGraph reconstruct(const EnhancedGraph& enhanced, std::span<const TypedCommunity> all_communities,
                            const std::map<std::uint32_t, std::string>& summaries);

double gcr(std::size_t compressed_nodes, std::size_t original_nodes);
double gcr(const CompressedGraph& compressed, const TagGraph& original);
// acc in percent.
double gci(double acc, double gcr);
double normalized_gci(double gci, double reference_gci);

// 4 bytes per feature scalar, 16 per weighted edge, UTF-8 bytes of texts and labels.
std::size_t estimate_memory(const NodeBundle& bundle);
NodeBundle compressed_bundle(const CompressedGraph& compressed, const TagGraph& original);
// Nodes of `original` restricted to `nodes` with the given edges.
NodeBundle subgraph_bundle(const TagGraph& original, std::span<const NodeId> nodes, std::size_t edge_count);

void write_compressed(const CompressedGraph& compressed, const TagGraph& original,
                      const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                      const std::filesystem::path& provenance_path);

}  // namespace tagc
