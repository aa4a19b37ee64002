#include "tagc/coding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "tagc/error.hpp"
#include "tagc/kernels.hpp"

namespace tagc {

namespace {

double entropy_term(double g, double vol, double parent_vol, double graph_vol) {
  if (g <= 0.0 || vol <= 0.0) return 0.0;
  return -(g / graph_vol) * std::log2(vol / parent_vol);
}

double merge_gain(double cut_weight, double merged_vol, double graph_vol) {
  if (cut_weight <= 0.0 || merged_vol <= 0.0) return 0.0;
  return 2.0 * cut_weight / graph_vol * std::log2(graph_vol / merged_vol);
}

std::string id_str(CommunityId id) { return std::to_string(id); }

}  // namespace

CodingTree::CodingTree(const WeightedGraph& graph)
    : graph_(&graph), root_(static_cast<CommunityId>(graph.num_nodes())), num_leaves_(graph.num_nodes()) {
  const auto n = graph.num_nodes();
  nodes_.resize(n + 1);
  for (std::size_t v = 0; v < n; ++v) {
    auto& leaf = nodes_[v];
    leaf.id = static_cast<CommunityId>(v);
    leaf.parent = root_;
    leaf.g = static_cast<double>(graph.degree(static_cast<NodeId>(v)));
    leaf.vol = leaf.g;
  }
  auto& root = nodes_[root_];
  root.id = root_;
  root.vol = graph.volume();
  root.children.resize(n);
  for (std::size_t v = 0; v < n; ++v) root.children[v] = static_cast<CommunityId>(v);
  entropy_ = recompute_entropy();
}

std::vector<CommunityId> CodingTree::alive_ids() const {
  std::vector<CommunityId> out;
  for (const auto& c : nodes_)
    if (c.alive) out.push_back(c.id);
  return out;
}

int CodingTree::depth(CommunityId id) const {
  int d = 0;
  for (CommunityId c = id; c != root_; c = nodes_.at(c).parent) ++d;
  return d;
}

int CodingTree::height() const {
  int best = 0;
  std::vector<std::pair<CommunityId, int>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [c, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (CommunityId ch : nodes_[c].children) stack.emplace_back(ch, d + 1);
  }
  return best;
}

std::vector<NodeId> CodingTree::vertex_set(CommunityId id) const {
  std::vector<NodeId> out;
  std::vector<CommunityId> stack{id};
  while (!stack.empty()) {
    CommunityId c = stack.back();
    stack.pop_back();
    const auto& node = nodes_.at(c);
    if (node.is_leaf() && c < num_leaves_) {
      out.push_back(static_cast<NodeId>(c));
      continue;
    }
    for (CommunityId ch : node.children) stack.push_back(ch);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool CodingTree::is_root_child(CommunityId id) const {
  return id < nodes_.size() && nodes_[id].alive && nodes_[id].parent == root_;
}

double CodingTree::entropy() const {
  if (graph_volume() <= 0.0) throw ValidationError("structural entropy needs at least one edge");
  return entropy_;
}

double CodingTree::term(CommunityId id) const {
  const auto& c = nodes_.at(id);
  if (id == root_ || !c.alive) return 0.0;
  return entropy_term(c.g, c.vol, nodes_[c.parent].vol, graph_volume());
}

double CodingTree::recompute_entropy() const {
  if (graph_volume() <= 0.0) return 0.0;
  double total = 0.0;
  for (const auto& c : nodes_)
    if (c.alive && c.id != root_) total += term(c.id);
  return total;
}

void CodingTree::require_root_children(CommunityId a, CommunityId b) const {
  if (a == b) throw ValidationError("merge needs two distinct communities");
  if (!is_root_child(a) || !is_root_child(b))
    throw ValidationError("merge operands " + id_str(a) + ", " + id_str(b) + " are not both root children");
}

double CodingTree::merge_delta(CommunityId a, CommunityId b) const {
  require_root_children(a, b);
  const auto va = vertex_set(a), vb = vertex_set(b);
  return merge_gain(cut(*graph_, va, vb), nodes_[a].vol + nodes_[b].vol, graph_volume());
}

CommunityId CodingTree::apply_merge(CommunityId a, CommunityId b) {
  require_root_children(a, b);
  const auto va = vertex_set(a), vb = vertex_set(b);
  return merge_with_cut(a, b, cut(*graph_, va, vb));
}

CommunityId CodingTree::merge_with_cut(CommunityId a, CommunityId b, double cut_weight) {
  const double gain = merge_gain(cut_weight, nodes_[a].vol + nodes_[b].vol, graph_volume());
  TreeCommunity m;
  m.id = static_cast<CommunityId>(nodes_.size());
  m.parent = root_;
  m.children = {a, b};
  m.g = nodes_[a].g + nodes_[b].g - 2.0 * cut_weight;
  m.vol = nodes_[a].vol + nodes_[b].vol;
  nodes_[a].parent = m.id;
  nodes_[b].parent = m.id;
  auto& rc = nodes_[root_].children;
  rc.erase(std::remove_if(rc.begin(), rc.end(), [&](CommunityId c) { return c == a || c == b; }), rc.end());
  rc.push_back(m.id);
  nodes_.push_back(std::move(m));
  entropy_ -= gain;
  return nodes_.back().id;
}

double CodingTree::sum_child_g(CommunityId id) const {
  double s = 0.0;
  for (CommunityId ch : nodes_[id].children) s += nodes_[ch].g;
  return s;
}

double CodingTree::drop_cost(CommunityId id) const {
  const auto& c = nodes_.at(id);
  if (id == root_ || !c.alive) throw ValidationError("cannot drop the root or a removed community");
  if (c.is_leaf()) throw ValidationError("cannot drop leaf community " + id_str(id));
  if (c.vol <= 0.0) return 0.0;
  const double parent_vol = nodes_[c.parent].vol;
  return (sum_child_g(id) - c.g) / graph_volume() * std::log2(parent_vol / c.vol);
}

void CodingTree::apply_drop(CommunityId id) {
  const double cost = drop_cost(id);
  auto& c = nodes_[id];
  auto& parent = nodes_[c.parent];
  parent.children.erase(std::find(parent.children.begin(), parent.children.end(), id));
  for (CommunityId ch : c.children) {
    nodes_[ch].parent = c.parent;
    parent.children.push_back(ch);
  }
  c.children.clear();
  c.alive = false;
  c.parent = kNoCommunity;
  entropy_ += cost;
}

double CodingTree::deduction_se(CommunityId ancestor, CommunityId descendant) const {
  if (ancestor == descendant) throw ValidationError("deduction needs a proper ancestor");
  if (!nodes_.at(ancestor).alive || !nodes_.at(descendant).alive)
    throw ValidationError("deduction over a removed community");
  double total = 0.0;
  for (CommunityId c = descendant; c != ancestor; c = nodes_[c].parent) {
    if (c == root_) throw ValidationError(id_str(ancestor) + " is not an ancestor of " + id_str(descendant));
    total += term(c);
  }
  return total;
}

void CodingTree::pad_leaves(int h) {
  for (CommunityId leaf = 0; leaf < num_leaves_; ++leaf) {
    int d = depth(leaf);
    while (d < h) {
      const CommunityId parent = nodes_[leaf].parent;
      TreeCommunity pad;
      pad.id = static_cast<CommunityId>(nodes_.size());
      pad.parent = parent;
      pad.children = {leaf};
      pad.g = nodes_[leaf].g;
      pad.vol = nodes_[leaf].vol;
      auto& siblings = nodes_[parent].children;
      *std::find(siblings.begin(), siblings.end(), leaf) = pad.id;
      nodes_[leaf].parent = pad.id;
      nodes_.push_back(std::move(pad));
      ++d;
    }
  }
}

void CodingTree::audit(double tolerance) const {
  std::vector<NodeId> all(num_leaves_);
  for (std::size_t v = 0; v < num_leaves_; ++v) all[v] = static_cast<NodeId>(v);
  for (const auto& c : nodes_) {
    if (!c.alive) continue;
    for (CommunityId ch : c.children)
      if (nodes_[ch].parent != c.id) throw ValidationError("broken parent link under " + id_str(c.id));
    if (c.is_leaf() && c.id >= num_leaves_) throw ValidationError("internal community without children");
    const auto members = vertex_set(c.id);
    std::vector<NodeId> rest;
    std::set_difference(all.begin(), all.end(), members.begin(), members.end(), std::back_inserter(rest));
    const double vol = volume(*graph_, members);
    const double g = cut(*graph_, members, rest);
    if (std::abs(vol - c.vol) > tolerance || std::abs(g - c.g) > tolerance)
      throw ValidationError("stale g/vol cache on community " + id_str(c.id));
  }
  if (vertex_set(root_).size() != num_leaves_) throw ValidationError("root does not cover every vertex");
  if (graph_volume() > 0.0 && std::abs(recompute_entropy() - entropy_) > tolerance)
    throw ValidationError("running entropy drifted from recomputation");
}

// Greedy two-stage construction with lazy heaps.
class TreeBuilder {
 public:
  TreeBuilder(CodingTree& tree, const TreeBuildOptions& opts, TreeBuildStats& stats)
      : tree_(tree), opts_(opts), stats_(stats) {}

  void merge_stage() {
    const auto& graph = tree_.graph();
    const double graph_vol = graph.volume();
    const std::size_t n = graph.num_nodes();
    adj_.assign(n + 1, {});
    for (const auto& e : graph.edges()) {
      adj_[e.u].emplace_back(e.v, static_cast<double>(e.w));
      adj_[e.v].emplace_back(e.u, static_cast<double>(e.w));
    }
    for (auto& row : adj_) std::sort(row.begin(), row.end());

    const auto gains = kernels::parallel::singleton_merge_gains(graph);
    const auto edges = graph.edges();
    heap_.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) heap_.push_back({gains[e], edges[e].u, edges[e].v});
    std::make_heap(heap_.begin(), heap_.end(), MergeOrder{});
    stats_.candidate_evaluations += edges.size();
    const std::size_t compact_at = 2 * edges.size() + n + 16;

    while (tree_.nodes_[tree_.root_].children.size() > 2 && !heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), MergeOrder{});
      const MergeCandidate best = heap_.back();
      heap_.pop_back();
      if (!tree_.is_root_child(best.a) || !tree_.is_root_child(best.b)) continue;
      if (best.gain <= 0.0) break;

      auto merged_adj = merged_adjacency(best.a, best.b);
      double cut_weight = 0.0;
      for (const auto& [other, w] : adj_[best.a])
        if (other == best.b) cut_weight += w;
      const CommunityId m = tree_.merge_with_cut(best.a, best.b, cut_weight);
      ++stats_.merges;
      adj_.resize(tree_.nodes_.size());
      const double vol_m = tree_.nodes_[m].vol;
      for (const auto& [other, w] : merged_adj) {
        adj_[other].emplace_back(m, w);
        heap_.push_back({merge_gain(w, vol_m + tree_.nodes_[other].vol, graph_vol), other, m});
        std::push_heap(heap_.begin(), heap_.end(), MergeOrder{});
      }
      stats_.candidate_evaluations += merged_adj.size();
      adj_[m] = std::move(merged_adj);
      adj_[best.a].clear();
      adj_[best.a].shrink_to_fit();
      adj_[best.b].clear();
      adj_[best.b].shrink_to_fit();
      if (heap_.size() > compact_at) compact();
      if (opts_.audit) tree_.audit();
    }
    heap_.clear();
    heap_.shrink_to_fit();
    adj_.clear();
    adj_.shrink_to_fit();
  }

  void drop_stage(int h) {
    const std::size_t size = tree_.nodes_.size();
    depth_.assign(size, 0);
    version_.assign(size, 0);
    leaves_at_depth_.assign(size + 2, 0);
    // Depths top-down; nodes_ is not topologically ordered after merges.
    std::vector<CommunityId> stack{tree_.root_};
    int max_depth = 0;
    while (!stack.empty()) {
      CommunityId c = stack.back();
      stack.pop_back();
      for (CommunityId ch : tree_.nodes_[c].children) {
        depth_[ch] = depth_[c] + 1;
        stack.push_back(ch);
      }
      if (c < tree_.num_leaves_) {
        ++leaves_at_depth_[depth_[c]];
        max_depth = std::max(max_depth, depth_[c]);
      }
    }
    stats_.height_after_merge = max_depth;

    std::vector<DropCandidate> heap;
    auto push = [&](CommunityId c) {
      heap.push_back({tree_.drop_cost(c), c, version_[c]});
      std::push_heap(heap.begin(), heap.end(), DropOrder{});
      ++stats_.candidate_evaluations;
    };
    for (CommunityId c = static_cast<CommunityId>(tree_.num_leaves_ + 1); c < size; ++c)
      if (tree_.nodes_[c].alive) push(c);

    while (max_depth > h && !heap.empty()) {
      std::pop_heap(heap.begin(), heap.end(), DropOrder{});
      const DropCandidate best = heap.back();
      heap.pop_back();
      const auto& node = tree_.nodes_[best.id];
      if (!node.alive || best.version != version_[best.id]) continue;

      const CommunityId parent = node.parent;
      const std::vector<CommunityId> children = node.children;
      lift_subtree(best.id);
      tree_.apply_drop(best.id);
      ++stats_.drops;
      while (max_depth > 0 && leaves_at_depth_[max_depth] == 0) --max_depth;

      // Costs that read the changed parent volume or child-g sum.
      if (parent != tree_.root_) {
        ++version_[parent];
        push(parent);
      }
      for (CommunityId ch : children) {
        if (tree_.nodes_[ch].is_leaf()) continue;
        ++version_[ch];
        push(ch);
      }
      if (opts_.audit) tree_.audit();
    }
  }

 private:
  struct MergeCandidate {
    double gain;
    CommunityId a, b;  // a < b
    MergeCandidate(double g, CommunityId x, CommunityId y) : gain(g), a(std::min(x, y)), b(std::max(x, y)) {}
  };
  // Max-heap on gain, ties to the lexicographically smallest pair.
  struct MergeOrder {
    bool operator()(const MergeCandidate& l, const MergeCandidate& r) const {
      if (l.gain != r.gain) return l.gain < r.gain;
      if (l.a != r.a) return l.a > r.a;
      return l.b > r.b;
    }
  };
  struct DropCandidate {
    double cost;
    CommunityId id;
    std::uint32_t version;
  };
  // Min-heap on cost, ties to the smallest id.
  struct DropOrder {
    bool operator()(const DropCandidate& l, const DropCandidate& r) const {
      if (l.cost != r.cost) return l.cost > r.cost;
      return l.id > r.id;
    }
  };

  // Union of both operands' live neighbor lists with cuts summed, sorted by id.
  std::vector<std::pair<CommunityId, double>> merged_adjacency(CommunityId a, CommunityId b) {
    std::vector<std::pair<CommunityId, double>> out;
    out.reserve(adj_[a].size() + adj_[b].size());
    auto live = [&](CommunityId c) { return c != a && c != b && tree_.is_root_child(c); };
    std::size_t i = 0, j = 0;
    const auto& x = adj_[a];
    const auto& y = adj_[b];
    auto emit = [&](CommunityId c, double w) {
      if (!live(c)) return;
      if (!out.empty() && out.back().first == c) out.back().second += w;
      else out.emplace_back(c, w);
    };
    while (i < x.size() || j < y.size()) {
      if (j == y.size() || (i < x.size() && x[i].first <= y[j].first)) {
        emit(x[i].first, x[i].second);
        ++i;
      } else {
        emit(y[j].first, y[j].second);
        ++j;
      }
    }
    return out;
  }

  void compact() {
    std::erase_if(heap_, [&](const MergeCandidate& c) {
      return !tree_.is_root_child(c.a) || !tree_.is_root_child(c.b);
    });
    std::make_heap(heap_.begin(), heap_.end(), MergeOrder{});
  }

  // Every vertex under `id` moves one level up once `id` is dropped.
  void lift_subtree(CommunityId id) {
    std::vector<CommunityId> stack(tree_.nodes_[id].children);
    while (!stack.empty()) {
      CommunityId c = stack.back();
      stack.pop_back();
      if (c < tree_.num_leaves_) {
        --leaves_at_depth_[depth_[c]];
        ++leaves_at_depth_[depth_[c] - 1];
      }
      --depth_[c];
      for (CommunityId ch : tree_.nodes_[c].children) stack.push_back(ch);
    }
  }

  CodingTree& tree_;
  const TreeBuildOptions& opts_;
  TreeBuildStats& stats_;
  std::vector<std::vector<std::pair<CommunityId, double>>> adj_;
  std::vector<MergeCandidate> heap_;
  std::vector<int> depth_;
  std::vector<std::uint32_t> version_;
  std::vector<std::size_t> leaves_at_depth_;
};

CodingTree build_coding_tree(const WeightedGraph& graph, const TreeBuildOptions& opts, TreeBuildStats* stats) {
  if (opts.height <= 1) throw ValidationError("coding tree height must be > 1");
  if (graph.num_nodes() == 0) throw ValidationError("cannot build a coding tree over an empty graph");
  if (graph.num_edges() == 0) throw ValidationError("coding tree construction needs at least one edge");
  TreeBuildStats local;
  TreeBuildStats& st = stats ? *stats : local;
  st = {};

  CodingTree tree(graph);
  st.entropy_one_dim = tree.entropy();
  TreeBuilder builder(tree, opts, st);
  builder.merge_stage();
  st.entropy_after_merge = tree.entropy();
  builder.drop_stage(opts.height);
  tree.pad_leaves(opts.height);
  st.entropy_final = tree.entropy();
  if (opts.audit) tree.audit();
  return tree;
}

std::vector<Community> finest_partition(const CodingTree& tree) {
  if (tree.height() < 2) throw ValidationError("finest partition needs a tree of height >= 2");
  std::vector<std::vector<NodeId>> groups;
  std::vector<std::size_t> slot(tree.arena_size(), static_cast<std::size_t>(-1));
  for (NodeId v = 0; v < tree.num_leaves(); ++v) {
    const CommunityId parent = tree.community(v).parent;
    if (parent == tree.root()) {
      groups.push_back({v});
      continue;
    }
    if (slot[parent] == static_cast<std::size_t>(-1)) {
      slot[parent] = groups.size();
      groups.emplace_back();
    }
    groups[slot[parent]].push_back(v);
  }
  // Vertices are visited in increasing order, so each group is sorted and
  // groups are already ordered by smallest member.
  std::vector<Community> out(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out[i].id = static_cast<std::uint32_t>(i);
    out[i].members = std::move(groups[i]);
  }
  return out;
}

}  // namespace tagc
