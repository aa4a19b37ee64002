#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tagc {

using NodeId = std::uint32_t;
using Weight = std::int64_t;

enum class EdgeOrigin : std::uint8_t { Original, Knn, Condensed };

const char* to_string(EdgeOrigin origin);
EdgeOrigin edge_origin_from_string(const std::string& s);

// Undirected weighted edge, stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  Weight w = 1;
  EdgeOrigin origin = EdgeOrigin::Original;
};

struct Neighbor {
  NodeId node;
  Weight w;
};

// Symmetrized weighted multigraph collapsed to simple form: parallel edges
// accumulate weight, CSR adjacency is built once and never mutated.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Accumulates duplicate pairs (in either orientation). When duplicates
  // disagree on origin, Original wins over Knn wins over Condensed.
  // Throws ValidationError on self-loops, out-of-range ids or weight < 1.
  WeightedGraph(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return degree_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(NodeId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  Weight degree(NodeId v) const { return degree_[v]; }
  std::span<const Weight> degrees() const { return degree_; }
  // Sum of edge weights; vol(G) = 2 * total_weight().
  Weight total_weight() const { return total_weight_; }
  double volume() const { return 2.0 * static_cast<double>(total_weight_); }
  // Weight of edge {a, b}, 0 when absent. O(log deg).
  Weight weight(NodeId a, NodeId b) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adj_;
  std::vector<Weight> degree_;
  Weight total_weight_ = 0;
};

enum class Role : std::uint8_t { Target, Background };

struct Node {
  NodeId id = 0;
  std::int64_t external_id = 0;
  std::string text;
  std::optional<std::string> label;
  Role role = Role::Background;
  std::vector<double> feature;  // empty when absent

  bool is_target() const { return role == Role::Target; }
  bool has_feature() const { return !feature.empty(); }
};

// Text-attributed graph. Node ids are dense 0..n-1 in file order; the
// original ids survive as Node::external_id.
struct TagGraph {
  std::vector<Node> nodes;
  WeightedGraph topology;
  std::size_t feature_dim = 0;  // 0 when no node carries a feature

  std::size_t size() const { return nodes.size(); }
  std::size_t num_targets() const;
  bool all_have_features() const;
  // Throws MissingFeatures naming the first node without one.
  void require_features() const;

  // Checks the documented invariants; throws ValidationError.
  void validate() const;
};

TagGraph load_tag(const std::filesystem::path& nodes_path,
                  const std::filesystem::path& edges_path);
void save_tag(const TagGraph& graph, const std::filesystem::path& nodes_path,
              const std::filesystem::path& edges_path);

// Reads `src,dst[,weight][,origin]` rows, header optional. Ids are external
// ids resolved through `resolve`; returns raw (unaccumulated) edges.
struct RawEdge {
  std::int64_t src;
  std::int64_t dst;
  Weight w;
  EdgeOrigin origin;
  std::size_t line;
};
std::vector<RawEdge> read_edges_csv(const std::filesystem::path& path);

// Writes edges using external ids from `ids` (identity when empty).
void write_edges_csv(const std::filesystem::path& path, std::span<const Edge> edges,
                     std::span<const std::int64_t> ids = {}, bool with_origin = false);

void write_id_map(const TagGraph& graph, const std::filesystem::path& path);

double volume(const WeightedGraph& graph, std::span<const NodeId> subset);
double cut(const WeightedGraph& graph, std::span<const NodeId> a, std::span<const NodeId> b);

// Serializable quadruple used for memory accounting.
struct NodeBundle {
  std::size_t feature_bytes = 0;
  std::size_t edge_bytes = 0;
  std::size_t label_bytes = 0;
  std::size_t text_bytes = 0;

  std::size_t total() const { return feature_bytes + edge_bytes + label_bytes + text_bytes; }
};

inline constexpr std::size_t kBytesPerFeatureScalar = 4;
inline constexpr std::size_t kBytesPerEdge = 16;

}  // namespace tagc
