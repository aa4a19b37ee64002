#include "tagc/community.hpp"

#include <map>

#include "tagc/error.hpp"

namespace tagc {

const char* to_string(CommunityType type) {
  switch (type) {
    case CommunityType::PureTarget: return "pure_target";
    case CommunityType::SpecificTarget: return "specific_target";
    case CommunityType::CommonSharedTarget: return "common_shared_target";
    case CommunityType::MixedTarget: return "mixed_target";
    case CommunityType::PureBackground: return "pure_background";
  }
  return "pure_background";
}

CommunityType community_type_from_string(const std::string& s) {
  for (auto t : {CommunityType::PureTarget, CommunityType::SpecificTarget, CommunityType::CommonSharedTarget,
                 CommunityType::MixedTarget, CommunityType::PureBackground}) {
    if (s == to_string(t)) return t;
  }
  throw ValidationError("unknown community type '" + s + "'");
}

CommunityType type_for_counts(std::size_t targets, std::size_t backgrounds) {
  if (targets + backgrounds == 0) throw ValidationError("community has no members");
  if (targets == 0) return CommunityType::PureBackground;
  if (backgrounds == 0) return CommunityType::PureTarget;
  if (targets == 1) return CommunityType::SpecificTarget;
  if (backgrounds == 1) return CommunityType::CommonSharedTarget;
  return CommunityType::MixedTarget;
}

CommunityType classify_community(std::span<const NodeId> members, const TagGraph& graph) {
  std::size_t t = 0;
  for (NodeId v : members) t += graph.nodes.at(v).is_target();
  return type_for_counts(t, members.size() - t);
}

std::vector<TypedCommunity> type_communities(const std::vector<Community>& partition, const TagGraph& graph) {
  std::vector<TypedCommunity> out;
  out.reserve(partition.size());
  for (const auto& c : partition) {
    TypedCommunity tc;
    tc.id = c.id;
    tc.members = c.members;
    for (NodeId v : c.members) tc.target_count += graph.nodes.at(v).is_target();
    tc.background_count = c.members.size() - tc.target_count;
    tc.type = type_for_counts(tc.target_count, tc.background_count);
    out.push_back(std::move(tc));
  }
  return out;
}

CommunityHomophily community_homophily(std::span<const NodeId> members, const TagGraph& graph) {
  if (members.empty()) throw ValidationError("homophily of an empty community");
  std::map<std::string, std::size_t> counts;
  CommunityHomophily out;
  for (NodeId v : members) {
    const auto& node = graph.nodes.at(v);
    if (!node.label) {
      if (node.is_target())
        throw ValidationError("target node " + std::to_string(node.external_id) + " has no label");
      ++out.unlabeled;
      continue;
    }
    ++counts[*node.label];
    ++out.counted;
  }
  if (out.counted == 0) return out;
  std::size_t best = 0;
  // std::map iterates labels in lexicographic order; strict > keeps the first.
  for (const auto& [label, n] : counts) {
    if (n > best) {
      best = n;
      out.majority_label = label;
    }
  }
  out.score = static_cast<double>(best) / static_cast<double>(out.counted);
  return out;
}

HomophilyReport partition_homophily(const std::vector<std::vector<NodeId>>& communities, const TagGraph& graph) {
  if (communities.empty()) throw ValidationError("homophily of an empty partition");
  HomophilyReport report;
  double sum = 0.0, weighted = 0.0;
  std::size_t scored = 0, weight_total = 0;
  for (const auto& members : communities) {
    auto h = community_homophily(members, graph);
    report.skipped_unlabeled += h.unlabeled;
    if (h.counted > 0) {
      sum += h.score;
      weighted += h.score * static_cast<double>(h.counted);
      ++scored;
      weight_total += h.counted;
    }
    report.per_community.push_back(std::move(h));
  }
  if (scored == 0) throw ValidationError("no labeled members in any community");
  report.mean = sum / static_cast<double>(scored);
  report.size_weighted = weighted / static_cast<double>(weight_total);
  return report;
}

}  // namespace tagc
