#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tagc/aggregate.hpp"
#include "tagc/coding_tree.hpp"
#include "tagc/community.hpp"
#include "tagc/config.hpp"
#include "tagc/enhance.hpp"
#include "tagc/infer.hpp"
#include "tagc/reconstruct.hpp"
#include "tagc/report.hpp"

namespace tagc {

struct PartitionOptions {
  bool gse_enabled = true;
  std::size_t k_max = 10;
  double epsilon = 1e-3;
  SimilarityOptions similarity;
  TreeBuildOptions tree;
};

struct PartitionResult {
  std::optional<KSelection> selection;  // empty when enhancement is off
  EnhancedGraph enhanced;
  TreeBuildStats tree_stats;
  double tree_entropy = 0.0;
  std::vector<Community> partition;
};

// Enhancement followed by coding-tree partitioning. `graph` must outlive
// the result.
PartitionResult enhance_and_partition(const TagGraph& graph, const PartitionOptions& opts);

// Groups for the homophily report: member lists in community order.
std::vector<std::vector<NodeId>> member_lists(std::span<const TypedCommunity> communities);

enum class Stage { Enhance, Partition, Type, Aggregate, Reconstruct, Infer, Metrics };

const std::vector<Stage>& all_stages();
// Per-stage seed derived from the master seed.
std::uint64_t stage_seed(std::uint64_t master, Stage stage);
const char* to_string(Stage stage);
Stage stage_from_string(const std::string& s);

struct StageOutcome {
  Stage stage;
  bool executed = false;
  double elapsed_ms = 0.0;
};

struct RunResult {
  std::vector<StageOutcome> stages;
  std::optional<EvalReport> report;  // present once the metrics stage has run or was loaded
};

// Runs stages up to and including `last`. A stage is skipped when its
// content stamp matches and its artifacts exist; once one stage executes,
// every later stage executes too. Errors carry the failing stage name;
// transport exhaustion is rethrown as TransportError.
RunResult run_pipeline(const RunConfig& config, Stage last = Stage::Metrics);

enum class InspectWhat { Communities, Compressed, Predictions };
InspectWhat inspect_what_from_string(const std::string& s);
void inspect(const std::filesystem::path& run_dir, InspectWhat what, std::ostream& out);

}  // namespace tagc
