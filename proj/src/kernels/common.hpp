#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tagc/kernels.hpp"

namespace tagc::kernels::detail {

// Bounded best-first list for one source row.
class TopList {
 public:
  explicit TopList(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  void offer(NodeId id, double score) {
    const std::int64_t key = score_key(score);
    if (items_.size() == k_ &&
        !ranks_before(key, id, items_.back().key, items_.back().id))
      return;
    Item item{key, id, score};
    auto pos = std::upper_bound(items_.begin(), items_.end(), item, [](const Item& a, const Item& b) {
      return ranks_before(a.key, a.id, b.key, b.id);
    });
    items_.insert(pos, item);
    if (items_.size() > k_) items_.pop_back();
  }

  std::vector<Scored> take() const {
    std::vector<Scored> out;
    out.reserve(items_.size());
    for (const auto& it : items_) out.push_back({it.id, it.score});
    return out;
  }

 private:
  struct Item {
    std::int64_t key;
    NodeId id;
    double score;
  };
  std::size_t k_;
  std::vector<Item> items_;
};

inline double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t m = 0; m < d; ++m) s += a[m] * b[m];
  return s;
}

inline std::vector<Scored> topk_for_row(const CenteredRows& rows, std::size_t i, std::size_t k) {
  if (!rows.valid[i]) return {};
  TopList list(k);
  const double* zi = rows.z.data() + i * rows.dim;
  for (std::size_t j = 0; j < rows.rows; ++j) {
    if (j == i || !rows.valid[j]) continue;
    list.offer(static_cast<NodeId>(j), dot(zi, rows.z.data() + j * rows.dim, rows.dim));
  }
  return list.take();
}

// Stamped-visit BFS truncated at `cap` hops; returns reached targets.
class CappedBfs {
 public:
  explicit CappedBfs(std::size_t n) : stamp_(n, 0), dist_(n, 0) {}

  MssEntries run(const WeightedGraph& g, std::span<const std::uint8_t> is_target, NodeId source,
                 std::uint32_t cap) {
    ++epoch_;
    MssEntries out;
    frontier_.clear();
    frontier_.push_back(source);
    stamp_[source] = epoch_;
    dist_[source] = 0;
    for (std::size_t head = 0; head < frontier_.size(); ++head) {
      NodeId v = frontier_[head];
      if (dist_[v] == cap) continue;
      for (const auto& nb : g.neighbors(v)) {
        if (stamp_[nb.node] == epoch_) continue;
        stamp_[nb.node] = epoch_;
        dist_[nb.node] = dist_[v] + 1;
        if (is_target[nb.node]) out.emplace_back(nb.node, dist_[nb.node]);
        frontier_.push_back(nb.node);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> dist_;
  std::vector<NodeId> frontier_;
  std::uint32_t epoch_ = 0;
};

inline double merge_gain(double cut_weight, double merged_volume, double graph_volume) {
  if (cut_weight <= 0.0 || merged_volume <= 0.0) return 0.0;
  return 2.0 * cut_weight / graph_volume * std::log2(graph_volume / merged_volume);
}

}  // namespace tagc::kernels::detail
