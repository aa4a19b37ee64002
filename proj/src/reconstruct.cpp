#include "tagc/reconstruct.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "tagc/error.hpp"

namespace tagc {

namespace {

constexpr NodeId kDropped = std::numeric_limits<NodeId>::max();

std::int64_t condensed_external_base(const TagGraph& tag) {
  std::int64_t base = 0;
  for (const auto& n : tag.nodes) base = std::max(base, n.external_id + 1);
  return base;
}

}  // namespace

double CompressedGraph::total_edge_weight() const {
  double s = 0;
  for (const auto& e : edges) s += static_cast<double>(e.w);
  return s;
}

double CompressedGraph::total_absorbed() const {
  double s = 0;
  for (const auto& [id, w] : absorbed) s += w;
  return s;
}

WeightedGraph CompressedGraph::adjacency() const {
  return WeightedGraph(original_nodes + condensed.size(), edges);
}

CompressedGraph condense(const WeightedGraph& graph, const TagGraph& tag, std::span<const CondenseGroup> groups) {
  const std::size_t n = tag.size();
  if (graph.num_nodes() != n) throw ValidationError("condense: graph and node table differ in size");

  CompressedGraph out;
  out.original_nodes = n;
  std::vector<NodeId> target_of(n, kDropped);
  for (NodeId v = 0; v < n; ++v)
    if (tag.nodes[v].is_target()) {
      target_of[v] = v;
      out.targets.push_back(v);
    }

  std::vector<NodeId> group_node(groups.size(), kDropped);
  std::vector<std::uint8_t> assigned(n, 0);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    if (g.members.empty()) throw ValidationError("condense: empty group");
    NodeId dest;
    if (g.fold_into) {
      if (*g.fold_into >= n || !tag.nodes[*g.fold_into].is_target())
        throw ValidationError("condense: fold target is not a target node");
      dest = *g.fold_into;
      auto& suffix = out.context_suffix[dest];
      if (!suffix.empty()) suffix += ' ';
      suffix += g.summary;
    } else {
      CondensedNode c;
      c.id = static_cast<NodeId>(n + out.condensed.size());
      c.source_id = g.source_id;
      c.summary = g.summary;
      c.members = g.members;
      std::sort(c.members.begin(), c.members.end());
      dest = c.id;
      out.condensed.push_back(std::move(c));
    }
    group_node[gi] = dest;
    for (NodeId v : g.members) {
      if (v >= n) throw ValidationError("condense: member id out of range");
      if (tag.nodes[v].is_target()) throw ValidationError("condense: group member " + std::to_string(v) + " is a target");
      if (assigned[v]++) throw ValidationError("condense: node " + std::to_string(v) + " is in two groups");
      target_of[v] = dest;
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (target_of[v] == kDropped) out.dropped_nodes.push_back(v);

  // Per-group accounting for condensed nodes.
  std::vector<std::size_t> condensed_index(n, SIZE_MAX);
  for (std::size_t ci = 0; ci < out.condensed.size(); ++ci)
    for (NodeId v : out.condensed[ci].members) condensed_index[v] = ci;
  for (NodeId v = 0; v < n; ++v)
    if (condensed_index[v] != SIZE_MAX)
      out.condensed[condensed_index[v]].consolidated_degree += static_cast<double>(graph.degree(v));

  struct Acc {
    Weight w = 0;
    EdgeOrigin origin = EdgeOrigin::Condensed;
  };
  std::map<std::pair<NodeId, NodeId>, Acc> mapped;
  for (const auto& e : graph.edges()) {
    const auto cu = condensed_index[e.u], cv = condensed_index[e.v];
    const double w = static_cast<double>(e.w);
    if (cu != SIZE_MAX && cu == cv) {
      out.condensed[cu].absorbed_weight += w;
    } else {
      if (cu != SIZE_MAX) out.condensed[cu].boundary_weight += w;
      if (cv != SIZE_MAX) out.condensed[cv].boundary_weight += w;
    }

    NodeId a = target_of[e.u], b = target_of[e.v];
    if (a == kDropped || b == kDropped) {
      out.dropped_weight += w;
      ++out.dropped_edges;
      continue;
    }
    if (a == b) {
      out.absorbed[a] += w;
      continue;
    }
    if (a > b) std::swap(a, b);
    auto& acc = mapped[{a, b}];
    acc.w += e.w;
    EdgeOrigin origin = (a >= n || b >= n) ? EdgeOrigin::Condensed : e.origin;
    if (static_cast<int>(origin) < static_cast<int>(acc.origin)) acc.origin = origin;
  }
  out.edges.reserve(mapped.size());
  for (const auto& [key, acc] : mapped) out.edges.push_back({key.first, key.second, acc.w, acc.origin});
  return out;
}

std::vector<TypedCommunity> retain_communities(std::span<const TypedCommunity> typed) {
  std::vector<TypedCommunity> out;
  for (const auto& c : typed)
    if (c.target_count > 0) out.push_back(c);
  return out;
}

CompressedGraph reconstruct(const EnhancedGraph& enhanced, std::span<const TypedCommunity> all_communities,
                            const std::map<std::uint32_t, std::string>& summaries) {
  if (!enhanced.base) throw ValidationError("reconstruct: enhanced graph has no base");
  const TagGraph& tag = *enhanced.base;
  std::vector<std::uint8_t> covered(tag.size(), 0);
  for (const auto& c : all_communities)
    for (NodeId v : c.members) {
      if (v >= tag.size()) throw ValidationError("reconstruct: member id out of range");
      if (covered[v]++) throw ValidationError("reconstruct: node " + std::to_string(v) + " is in two communities");
    }
  for (NodeId v = 0; v < tag.size(); ++v)
    if (!covered[v]) throw ValidationError("reconstruct: node " + std::to_string(v) + " is not in any community");

  std::vector<CondenseGroup> groups;
  for (const auto& c : retain_communities(all_communities)) {
    if (c.background_count == 0) continue;
    auto it = summaries.find(c.id);
    if (it == summaries.end())
      throw ValidationError("reconstruct: no summary for community " + std::to_string(c.id));
    CondenseGroup g;
    g.source_id = c.id;
    g.summary = it->second;
    for (NodeId v : c.members)
      if (!tag.nodes[v].is_target()) g.members.push_back(v);
    groups.push_back(std::move(g));
  }
  return condense(enhanced.graph, tag, groups);
}

double gcr(std::size_t compressed_nodes, std::size_t original_nodes) {
  if (original_nodes == 0) throw ValidationError("gcr: empty original graph");
  return static_cast<double>(compressed_nodes) / static_cast<double>(original_nodes);
}

double gcr(const CompressedGraph& compressed, const TagGraph& original) {
  return gcr(compressed.num_nodes(), original.size());
}

double gci(double acc, double gcr_value) {
  if (!(gcr_value > 0.0)) throw ValidationError("gci: compression rate must be > 0");
  return acc / gcr_value;
}

double normalized_gci(double gci_value, double reference_gci) {
  if (!(reference_gci > 0.0)) throw ValidationError("normalized_gci: reference must be > 0");
  return gci_value / reference_gci;
}

std::size_t estimate_memory(const NodeBundle& bundle) { return bundle.total(); }

NodeBundle compressed_bundle(const CompressedGraph& compressed, const TagGraph& original) {
  NodeBundle b;
  for (NodeId t : compressed.targets) {
    const auto& n = original.nodes.at(t);
    b.feature_bytes += n.feature.size() * kBytesPerFeatureScalar;
    b.text_bytes += n.text.size();
    if (auto it = compressed.context_suffix.find(t); it != compressed.context_suffix.end())
      b.text_bytes += it->second.size();
    if (n.label) b.label_bytes += n.label->size();
  }
  for (const auto& c : compressed.condensed) b.text_bytes += c.summary.size();
  b.edge_bytes = compressed.edges.size() * kBytesPerEdge;
  return b;
}

NodeBundle subgraph_bundle(const TagGraph& original, std::span<const NodeId> nodes, std::size_t edge_count) {
  NodeBundle b;
  for (NodeId v : nodes) {
    const auto& n = original.nodes.at(v);
    b.feature_bytes += n.feature.size() * kBytesPerFeatureScalar;
    b.text_bytes += n.text.size();
    if (n.label) b.label_bytes += n.label->size();
  }
  b.edge_bytes = edge_count * kBytesPerEdge;
  return b;
}

void write_compressed(const CompressedGraph& compressed, const TagGraph& original,
                      const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                      const std::filesystem::path& provenance_path) {
  using nlohmann::ordered_json;
  const std::int64_t base = condensed_external_base(original);
  auto external = [&](NodeId id) {
    return compressed.is_condensed(id) ? base + static_cast<std::int64_t>(id - compressed.original_nodes)
                                       : original.nodes[id].external_id;
  };

  std::ofstream nodes(nodes_path);
  for (NodeId t : compressed.targets) {
    const auto& n = original.nodes[t];
    ordered_json obj;
    obj["id"] = n.external_id;
    std::string text = n.text;
    if (auto it = compressed.context_suffix.find(t); it != compressed.context_suffix.end())
      text += "\n" + it->second;
    obj["text"] = text;
    obj["label"] = n.label ? ordered_json(*n.label) : ordered_json(nullptr);
    obj["is_target"] = true;
    obj["feature"] = n.has_feature() ? ordered_json(n.feature) : ordered_json(nullptr);
    obj["origin"] = "original";
    nodes << obj.dump() << '\n';
  }
  for (const auto& c : compressed.condensed) {
    ordered_json obj;
    obj["id"] = external(c.id);
    obj["text"] = c.summary;
    obj["label"] = nullptr;
    obj["is_target"] = false;
    obj["feature"] = nullptr;
    obj["origin"] = "condensed";
    nodes << obj.dump() << '\n';
  }
  if (!nodes) throw Error("failed to write " + nodes_path.string());

  std::vector<std::int64_t> ids(compressed.original_nodes + compressed.condensed.size());
  for (NodeId i = 0; i < ids.size(); ++i) ids[i] = external(i);
  write_edges_csv(edges_path, compressed.edges, ids, true);

  std::ofstream prov(provenance_path);
  for (const auto& c : compressed.condensed) {
    ordered_json obj;
    obj["id"] = external(c.id);
    obj["community"] = c.source_id;
    std::vector<std::int64_t> members;
    for (NodeId v : c.members) members.push_back(original.nodes[v].external_id);
    obj["members"] = members;
    obj["boundary_weight"] = c.boundary_weight;
    obj["absorbed_weight"] = c.absorbed_weight;
    obj["consolidated_degree"] = c.consolidated_degree;
    prov << obj.dump() << '\n';
  }
  if (!prov) throw Error("failed to write " + provenance_path.string());
}

}  // namespace tagc
