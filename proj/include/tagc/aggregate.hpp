#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tagc/community.hpp"
#include "tagc/graph.hpp"
#include "tagc/llm.hpp"

namespace tagc {

struct AggregationJob {
  std::uint32_t community_id = 0;
  CommunityType type = CommunityType::SpecificTarget;
  std::vector<std::string> target_texts;      // context, sorted
  std::vector<std::string> background_texts;  // corpus, sorted
  std::string hash;
};

// Digest of the type and the sorted texts; member order does not matter.
std::string aggregation_hash(CommunityType type, std::vector<std::string> target_texts,
                             std::vector<std::string> background_texts);

AggregationJob make_job(std::uint32_t community_id, CommunityType type, std::vector<std::string> target_texts,
                        std::vector<std::string> background_texts);

// One job per community holding at least one background member.
std::vector<AggregationJob> make_jobs(std::span<const TypedCommunity> communities, const TagGraph& graph);

// Fills the template for `type`. Specific takes exactly one target,
// CommonShared exactly one background, Mixed any non-empty groups.
std::string render_aggregation_prompt(CommunityType type, std::span<const std::string> target_texts,
                                      std::span<const std::string> background_texts);

struct AggregationOptions {
  // Upper bound on the estimated prompt tokens of a single request.
  std::size_t context_budget = 3000;
  // On transport failure: false aborts, true substitutes the mock summary.
  bool fallback_to_mock = false;
  std::size_t mock_char_limit = 600;
  std::size_t max_inflight = 4;
};

struct AggregationResult {
  std::uint32_t community_id = 0;
  std::string hash;
  std::string summary;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  double latency_ms = 0.0;
  std::size_t requests = 0;  // 0 when served from cache
  bool cached = false;
  bool fell_back = false;
};

// Summarizes one job. Backgrounds that do not fit the context budget go to
// follow-up requests whose summaries are appended. `cache` may be null.
AggregationResult aggregate(const AggregationJob& job, LlmClient& client, ResponseCache* cache,
                            const AggregationOptions& opts = {});

// Results come back in job order regardless of completion order.
std::vector<AggregationResult> aggregate_all(std::span<const AggregationJob> jobs, LlmClient& client,
                                             ResponseCache* cache, const AggregationOptions& opts = {});

}  // namespace tagc
