#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tagc/aggregate.hpp"
#include "tagc/graph.hpp"
#include "tagc/infer.hpp"
#include "tagc/kernels.hpp"
#include "tagc/llm.hpp"
#include "tagc/reconstruct.hpp"
#include "tagc/report.hpp"

namespace tagc {

enum class SamplingStrategy { Random, Degree, Number, Rag };

SamplingStrategy sampling_strategy_from_string(const std::string& s);
const char* to_string(SamplingStrategy s);

// 1-hop neighbors of `target` in the original topology, admitted in
// strategy order until the next one would push the summed token estimate of
// the admitted texts past `budget`.
std::vector<NodeId> sample_neighbors(const TagGraph& graph, NodeId target, SamplingStrategy strategy,
                                     std::size_t budget, std::uint64_t seed);

struct SampleBundle {
  std::map<NodeId, std::vector<NodeId>> per_target;
  std::vector<NodeId> nodes;  // targets plus every sampled neighbor, sorted
  std::vector<Edge> edges;    // original edges among `nodes`
  std::size_t bytes = 0;
};

SampleBundle build_sample_bundle(const TagGraph& graph, SamplingStrategy strategy, std::size_t budget,
                                 std::uint64_t seed);

struct Mss {
  NodeId background = 0;
  kernels::MssEntries reach;  // (target, hops), sorted by target
};

Mss mss(const TagGraph& graph, NodeId background, std::uint32_t cap);
// Every background node, ascending.
std::vector<Mss> mss_all(const TagGraph& graph, std::uint32_t cap);

enum class SkeletonVariant { Alpha, Beta, Gamma };

struct SkeletonClass {
  std::vector<NodeId> members;  // backgrounds, sorted
  std::vector<NodeId> targets;  // reachable targets, sorted
  bool fold = false;            // gamma affiliation class folded into targets[0]
};

// Backgrounds that reach no target within `cap` belong to no class.
// Classes are ordered by smallest member.
std::vector<SkeletonClass> skeleton_classes(const TagGraph& graph, SkeletonVariant variant, std::uint32_t cap);

CompressedGraph skeleton_compress(const TagGraph& graph, SkeletonVariant variant, std::uint32_t cap,
                                  LlmClient& client, ResponseCache* cache, const AggregationOptions& opts);

struct BaselineSettings {
  std::size_t budget = 512;
  std::uint32_t mss_cap = 2;
  std::uint64_t seed = 0;
  std::vector<std::string> categories;
  AggregationOptions aggregation;
  InferOptions infer;
  std::optional<double> reference_gci;
  // Options for the hs2c method.
  bool gse_enabled = true;
  std::size_t k_max = 10;
  double epsilon = 1e-3;
  int tree_height = 2;
  std::size_t exact_threshold = 50000;
};

// Methods: random, degree, number, rag, skeleton-alpha, skeleton-beta,
// skeleton-gamma, hs2c.
const std::vector<std::string>& baseline_methods();

EvalReport run_baseline_eval(const TagGraph& graph, const std::string& method, const BaselineSettings& settings,
                             LlmClient& client, ResponseCache* aggregation_cache, ResponseCache* classification_cache,
                             std::vector<Prediction>* predictions = nullptr);

}  // namespace tagc
