#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagc/graph.hpp"
#include "tagc/llm.hpp"
#include "tagc/reconstruct.hpp"

namespace tagc {

// Distinct neighbors of a target in the compressed graph, heaviest edge
// first, ties by ascending id.
std::vector<NodeId> neighbors_1hop(const CompressedGraph& compressed, NodeId target);

// Same ordering over an adjacency built once for many lookups.
std::vector<NodeId> ordered_neighbors(const WeightedGraph& adjacency, NodeId node);

struct ClassificationPrompt {
  std::string text;
  std::size_t neighbors_included = 0;
  std::size_t neighbors_dropped = 0;
  std::size_t tokens = 0;
};

// Neighbor texts are appended in the given order while the whole prompt
// stays within `token_budget`; the rest are dropped and counted.
ClassificationPrompt render_classification_prompt(std::string_view target_text,
                                                  std::span<const std::string> neighbor_texts,
                                                  std::span<const std::string> categories, std::size_t token_budget);

enum class ParseStatus { Matched, NoMatch, AmbiguousMatch };

struct ParsedLabel {
  ParseStatus status = ParseStatus::NoMatch;
  std::string label;  // set when matched
};

// Case-insensitive exact match of the trimmed answer, else the single
// category found as a substring. A hit contained in a longer hit does not
// count separately.
ParsedLabel parse_label(std::string_view answer, std::span<const std::string> categories);

struct Prediction {
  NodeId id = 0;
  std::int64_t external_id = 0;
  std::optional<std::string> pred;
  std::string gold;
  std::string raw_answer;
  ParseStatus status = ParseStatus::NoMatch;
  std::size_t neighbors_included = 0;
  std::size_t neighbors_dropped = 0;
};

struct Evaluation {
  double acc = 0.0;  // percent
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t unparsed = 0;
  // gold -> predicted -> count; unparsed answers are tallied under "(none)".
  std::map<std::string, std::map<std::string, std::size_t>> confusion;
};

// Every target of `graph` counts; a target without a prediction is wrong.
Evaluation evaluate(std::span<const Prediction> predictions, const TagGraph& graph);

struct InferOptions {
  std::size_t context_budget = 4096;
  std::size_t max_inflight = 4;
};

// Text shown for a target: its own text followed by any folded context.
std::string target_context(const CompressedGraph& compressed, const TagGraph& original, NodeId target);

// Classifies every target of the compressed graph; `cache` may be null.
std::vector<Prediction> classify_targets(const CompressedGraph& compressed, const TagGraph& original,
                                         std::span<const std::string> categories, LlmClient& client,
                                         ResponseCache* cache, const InferOptions& opts = {});

// Lower-level form used by the sampling baselines: explicit neighbor texts
// per target.
struct TargetContext {
  NodeId id = 0;
  std::string text;
  std::vector<std::string> neighbor_texts;
};
std::vector<Prediction> classify_contexts(std::span<const TargetContext> contexts, const TagGraph& original,
                                          std::span<const std::string> categories, LlmClient& client,
                                          ResponseCache* cache, const InferOptions& opts = {});

std::vector<std::string> read_categories(const std::filesystem::path& path);
// Sorted distinct labels of the graph.
std::vector<std::string> categories_from_labels(const TagGraph& graph);

const char* to_string(ParseStatus status);

}  // namespace tagc
