#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tagc/llm.hpp"

namespace tagc {

enum class LlmMode { Mock, Live };

struct RunConfig {
  std::filesystem::path nodes_path;
  std::filesystem::path edges_path;
  std::filesystem::path run_dir = "run";
  std::uint64_t seed = 0;

  bool gse_enabled = true;
  std::size_t gse_k_max = 10;
  double gse_epsilon = 1e-3;
  std::size_t gse_exact_threshold = 50000;

  int tree_height = 2;
  bool tree_audit = false;

  LlmMode llm_mode = LlmMode::Mock;
  LlmEndpointConfig llm;
  std::size_t llm_context_budget = 3000;
  bool llm_fallback = false;
  std::size_t llm_mock_char_limit = 600;

  std::size_t infer_context_budget = 4096;
  std::filesystem::path infer_categories_path;  // empty: sorted labels of the graph

  std::size_t baseline_budget = 512;
  std::uint32_t baseline_mss_cap = 2;

  std::optional<double> reference_gci;

  // Flat key -> value view with every default filled in; used for stage
  // stamps and printed by `tagc config`.
  nlohmann::ordered_json to_json() const;
};

struct ConfigKey {
  const char* key;
  const char* default_value;  // JSON literal
  const char* help;
};

// The single table of accepted keys and their defaults.
const std::vector<ConfigKey>& config_keys();

// Accepts nested objects ({"llm": {"model": ...}}) and dotted keys
// ({"llm.model": ...}) alike. Unknown keys, wrong types and out-of-range
// values raise ConfigError before anything runs. Relative paths resolve
// against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace tagc
