#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagc/coding_tree.hpp"
#include "tagc/graph.hpp"

namespace tagc {

enum class CommunityType { PureTarget, SpecificTarget, CommonSharedTarget, MixedTarget, PureBackground };

const char* to_string(CommunityType type);
CommunityType community_type_from_string(const std::string& s);

// Pure function of the composition; throws ValidationError for t + b == 0.
CommunityType type_for_counts(std::size_t targets, std::size_t backgrounds);

struct TypedCommunity {
  std::uint32_t id = 0;
  std::vector<NodeId> members;
  CommunityType type = CommunityType::PureTarget;
  std::size_t target_count = 0;
  std::size_t background_count = 0;
};

CommunityType classify_community(std::span<const NodeId> members, const TagGraph& graph);
std::vector<TypedCommunity> type_communities(const std::vector<Community>& partition, const TagGraph& graph);

struct CommunityHomophily {
  double score = 1.0;
  std::string majority_label;
  std::size_t counted = 0;    // labeled members that entered the score
  std::size_t unlabeled = 0;  // background members skipped for lack of a label
};

// Fraction of labeled members carrying the majority label; majority ties go
// to the lexicographically smallest label. Unlabeled target members are an
// error; unlabeled background members are skipped and counted.
CommunityHomophily community_homophily(std::span<const NodeId> members, const TagGraph& graph);

struct HomophilyReport {
  std::vector<CommunityHomophily> per_community;
  double mean = 0.0;           // unweighted mean over communities
  double size_weighted = 0.0;  // diagnostic only
  std::size_t skipped_unlabeled = 0;
};

// Communities whose members are all unlabeled are left out of the mean.
HomophilyReport partition_homophily(const std::vector<std::vector<NodeId>>& communities, const TagGraph& graph);

}  // namespace tagc
