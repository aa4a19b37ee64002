#include "tagc/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tagc/error.hpp"

namespace tagc {

namespace {

int origin_rank(EdgeOrigin o) {
  switch (o) {
    case EdgeOrigin::Original: return 0;
    case EdgeOrigin::Knn: return 1;
    case EdgeOrigin::Condensed: return 2;
  }
  return 2;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

const char* to_string(EdgeOrigin origin) {
  switch (origin) {
    case EdgeOrigin::Original: return "original";
    case EdgeOrigin::Knn: return "knn";
    case EdgeOrigin::Condensed: return "condensed";
  }
  return "original";
}

EdgeOrigin edge_origin_from_string(const std::string& s) {
  if (s == "original" || s.empty()) return EdgeOrigin::Original;
  if (s == "knn") return EdgeOrigin::Knn;
  if (s == "condensed") return EdgeOrigin::Condensed;
  throw ValidationError("unknown edge origin '" + s + "'");
}

WeightedGraph::WeightedGraph(std::size_t num_nodes, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes)
      throw ValidationError("edge references missing node");
    if (e.u == e.v) throw ValidationError("self-loop on node " + std::to_string(e.u));
    if (e.w < 1) throw ValidationError("edge weight must be >= 1");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
      edges_.back().w += e.w;
      if (origin_rank(e.origin) < origin_rank(edges_.back().origin)) edges_.back().origin = e.origin;
    } else {
      edges_.push_back(e);
    }
  }

  degree_.assign(num_nodes, 0);
  std::vector<std::size_t> count(num_nodes, 0);
  for (const auto& e : edges_) {
    ++count[e.u];
    ++count[e.v];
    degree_[e.u] += e.w;
    degree_[e.v] += e.w;
    total_weight_ += e.w;
  }
  offsets_.assign(num_nodes + 1, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) offsets_[i + 1] = offsets_[i] + count[i];
  adj_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // edges_ is sorted by (u, v), so each adjacency row ends up sorted by id.
  for (const auto& e : edges_) adj_[cursor[e.u]++] = {e.v, e.w};
  for (const auto& e : edges_) adj_[cursor[e.v]++] = {e.u, e.w};
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::sort(adj_.begin() + offsets_[i], adj_.begin() + offsets_[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

Weight WeightedGraph::weight(NodeId a, NodeId b) const {
  auto row = neighbors(a);
  auto it = std::lower_bound(row.begin(), row.end(), b,
                             [](const Neighbor& n, NodeId id) { return n.node < id; });
  return (it != row.end() && it->node == b) ? it->w : 0;
}

std::size_t TagGraph::num_targets() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_target(); }));
}

bool TagGraph::all_have_features() const {
  return std::all_of(nodes.begin(), nodes.end(), [](const Node& n) { return n.has_feature(); });
}

void TagGraph::require_features() const {
  for (const auto& n : nodes) {
    if (!n.has_feature())
      throw MissingFeatures("node " + std::to_string(n.external_id) + " has no feature vector");
  }
}

void TagGraph::validate() const {
  if (topology.num_nodes() != nodes.size())
    throw ValidationError("topology size does not match node count");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id != i) throw ValidationError("node ids are not dense");
    if (n.is_target() && n.text.empty())
      throw ValidationError("target node " + std::to_string(n.external_id) + " has empty text");
    if (n.has_feature() && n.feature.size() != feature_dim)
      throw ValidationError("node " + std::to_string(n.external_id) +
                            " feature dimension differs from the graph's");
  }
  if (feature_dim == 1) throw ValidationError("feature dimension must be >= 2");
}

TagGraph load_tag(const std::filesystem::path& nodes_path,
                  const std::filesystem::path& edges_path) {
  using nlohmann::json;
  std::ifstream in(nodes_path);
  if (!in) throw ValidationError("cannot open " + nodes_path.string());

  TagGraph g;
  std::unordered_map<std::int64_t, NodeId> index;
  const std::string file = nodes_path.string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(file, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(file, lineno, "expected a JSON object");
    Node n;
    try {
      if (!obj.contains("id") || !obj["id"].is_number_integer())
        throw ParseError(file, lineno, "missing integer \"id\"");
      n.external_id = obj["id"].get<std::int64_t>();
      if (obj.contains("text") && !obj["text"].is_null()) n.text = obj["text"].get<std::string>();
      if (obj.contains("label") && !obj["label"].is_null()) n.label = obj["label"].get<std::string>();
      if (!obj.contains("is_target") || !obj["is_target"].is_boolean())
        throw ParseError(file, lineno, "missing boolean \"is_target\"");
      n.role = obj["is_target"].get<bool>() ? Role::Target : Role::Background;
      if (obj.contains("feature") && !obj["feature"].is_null())
        n.feature = obj["feature"].get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ParseError(file, lineno, std::string("bad field type: ") + e.what());
    }
    if (n.is_target() && n.text.empty())
      throw ParseError(file, lineno, "target node has empty text");
    if (n.has_feature()) {
      if (n.feature.size() < 2) throw ParseError(file, lineno, "feature dimension must be >= 2");
      if (g.feature_dim == 0) g.feature_dim = n.feature.size();
      if (n.feature.size() != g.feature_dim)
        throw ParseError(file, lineno, "feature dimension " + std::to_string(n.feature.size()) +
                                           " differs from " + std::to_string(g.feature_dim));
    }
    n.id = static_cast<NodeId>(g.nodes.size());
    if (!index.emplace(n.external_id, n.id).second)
      throw ParseError(file, lineno, "duplicate node id " + std::to_string(n.external_id));
    g.nodes.push_back(std::move(n));
  }

  std::vector<Edge> edges;
  for (const auto& raw : read_edges_csv(edges_path)) {
    auto a = index.find(raw.src);
    auto b = index.find(raw.dst);
    if (a == index.end() || b == index.end()) {
      throw ParseError(edges_path.string(), raw.line,
                       "dangling endpoint " + std::to_string(a == index.end() ? raw.src : raw.dst));
    }
    if (a->second == b->second)
      throw ParseError(edges_path.string(), raw.line, "self-loop on " + std::to_string(raw.src));
    edges.push_back({a->second, b->second, raw.w, raw.origin});
  }
  g.topology = WeightedGraph(g.nodes.size(), std::move(edges));
  g.validate();
  return g;
}

std::vector<RawEdge> read_edges_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  const std::string file = path.string();
  std::vector<RawEdge> out;
  int col_src = 0, col_dst = 1, col_w = 2, col_origin = -1;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_csv(trim(line));
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (first) {
      first = false;
      std::int64_t probe;
      if (!parse_int(fields[0], probe)) {
        col_src = col_dst = col_w = col_origin = -1;
        for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
          if (fields[i] == "src") col_src = i;
          else if (fields[i] == "dst") col_dst = i;
          else if (fields[i] == "weight") col_w = i;
          else if (fields[i] == "origin") col_origin = i;
        }
        if (col_src < 0 || col_dst < 0) throw ParseError(file, lineno, "header lacks src/dst");
        continue;
      }
    }
    auto field = [&](int col) -> std::string_view {
      return (col >= 0 && col < static_cast<int>(fields.size())) ? fields[col] : std::string_view{};
    };
    RawEdge e{0, 0, 1, EdgeOrigin::Original, lineno};
    if (!parse_int(field(col_src), e.src) || !parse_int(field(col_dst), e.dst))
      throw ParseError(file, lineno, "expected integer src,dst");
    auto w = field(col_w);
    if (!w.empty()) {
      if (!parse_int(w, e.w)) throw ParseError(file, lineno, "weight is not an integer");
      if (e.w < 1) throw ParseError(file, lineno, "weight must be >= 1");
    }
    auto origin = field(col_origin);
    if (!origin.empty()) {
      std::string o(origin);
      if (o.rfind("origin=", 0) == 0) o = o.substr(7);
      try {
        e.origin = edge_origin_from_string(o);
      } catch (const ValidationError& err) {
        throw ParseError(file, lineno, err.what());
      }
    }
    out.push_back(e);
  }
  return out;
}

void write_edges_csv(const std::filesystem::path& path, std::span<const Edge> edges,
                     std::span<const std::int64_t> ids, bool with_origin) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << (with_origin ? "src,dst,weight,origin\n" : "src,dst,weight\n");
  for (const auto& e : edges) {
    std::int64_t a = ids.empty() ? e.u : ids[e.u];
    std::int64_t b = ids.empty() ? e.v : ids[e.v];
    out << a << ',' << b << ',' << e.w;
    if (with_origin) out << ',' << to_string(e.origin);
    out << '\n';
  }
}

void save_tag(const TagGraph& graph, const std::filesystem::path& nodes_path,
              const std::filesystem::path& edges_path) {
  std::ofstream out(nodes_path);
  if (!out) throw ValidationError("cannot write " + nodes_path.string());
  std::vector<std::int64_t> ids;
  ids.reserve(graph.size());
  for (const auto& n : graph.nodes) {
    nlohmann::ordered_json obj;
    obj["id"] = n.external_id;
    obj["text"] = n.text;
    obj["label"] = n.label ? nlohmann::ordered_json(*n.label) : nlohmann::ordered_json(nullptr);
    obj["is_target"] = n.is_target();
    obj["feature"] = n.has_feature() ? nlohmann::ordered_json(n.feature) : nlohmann::ordered_json(nullptr);
    out << obj.dump() << '\n';
    ids.push_back(n.external_id);
  }
  write_edges_csv(edges_path, graph.topology.edges(), ids);
}

void write_id_map(const TagGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "dense_id,external_id\n";
  for (const auto& n : graph.nodes) out << n.id << ',' << n.external_id << '\n';
}

double volume(const WeightedGraph& graph, std::span<const NodeId> subset) {
  double vol = 0.0;
  for (NodeId v : subset) {
    if (v >= graph.num_nodes()) throw ValidationError("unknown node id " + std::to_string(v));
    vol += static_cast<double>(graph.degree(v));
  }
  return vol;
}

double cut(const WeightedGraph& graph, std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<std::uint8_t> side(graph.num_nodes(), 0);
  for (NodeId v : a) {
    if (v >= graph.num_nodes()) throw ValidationError("unknown node id " + std::to_string(v));
    side[v] = 1;
  }
  for (NodeId v : b) {
    if (v >= graph.num_nodes()) throw ValidationError("unknown node id " + std::to_string(v));
    if (side[v] == 1) throw ValidationError("cut sets overlap at node " + std::to_string(v));
    side[v] = 2;
  }
  double total = 0.0;
  for (NodeId v : a) {
    for (const auto& nb : graph.neighbors(v)) {
      if (side[nb.node] == 2) total += static_cast<double>(nb.w);
    }
  }
  return total;
}

}  // namespace tagc
