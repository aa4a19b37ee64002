#include "tagc/config.hpp"

#include <fstream>
#include <map>

#include "tagc/error.hpp"

namespace tagc {

using nlohmann::json;

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"dataset.nodes", "\"\"", "nodes JSONL file (required)"},
      {"dataset.edges", "\"\"", "edges CSV file (required)"},
      {"run_dir", "\"run\"", "directory receiving every artifact"},
      {"seed", "0", "master seed; per-stage seeds are derived from it"},
      {"gse.enabled", "true", "add feature-similarity KNN edges before partitioning"},
      {"gse.k_max", "10", "largest k tried when choosing the KNN degree"},
      {"gse.epsilon", "0.001", "relative entropy gain below which k stops growing"},
      {"gse.exact_threshold", "50000", "node count above which similarity search uses LSH"},
      {"tree.height", "2", "coding-tree height, > 1"},
      {"tree.audit", "false", "recheck tree bookkeeping after every edit (slow)"},
      {"llm.mode", "\"mock\"", "mock | live"},
      {"llm.base_url", "\"http://127.0.0.1:8000/v1\"", "chat-completions endpoint root"},
      {"llm.model", "\"local-model\"", "model name sent to the endpoint"},
      {"llm.api_key_env", "\"TAGC_API_KEY\"", "environment variable holding the API key"},
      {"llm.temperature", "0.0", "sampling temperature"},
      {"llm.max_tokens", "512", "completion token cap"},
      {"llm.context_budget", "3000", "prompt token budget for aggregation requests"},
      {"llm.max_inflight", "4", "concurrent requests"},
      {"llm.timeout_seconds", "120.0", "per-request timeout"},
      {"llm.retries", "3", "retries after the first failed attempt"},
      {"llm.backoff_seconds", "0.5", "first retry delay, doubled per attempt"},
      {"llm.fallback", "false", "substitute mock summaries when the endpoint is unreachable"},
      {"llm.mock_char_limit", "600", "summary length cap of the mock client"},
      {"infer.context_budget", "4096", "prompt token budget for classification requests"},
      {"infer.categories_path", "\"\"", "one category per line; empty uses the graph's labels"},
      {"baseline.budget", "512", "neighbor token budget of the sampling baselines"},
      {"baseline.mss_cap", "2", "hop cap of the skeleton reachability search"},
      {"metrics.reference_gci", "null", "reference GCI for the normalized index"},
  };
  return keys;
}

namespace {

void flatten(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
  for (const auto& [k, v] : node.items()) {
    std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) flatten(v, key, out);
    else if (!out.emplace(key, v).second) throw ConfigError("config key '" + key + "' given twice");
  }
}

class Reader {
 public:
  explicit Reader(std::map<std::string, json> values) : values_(std::move(values)) {}

  const json& raw(const std::string& key) const { return values_.at(key); }

  std::string str(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_boolean()) fail(key, "true or false");
    return v.get<bool>();
  }
  std::uint64_t count(const std::string& key, std::uint64_t min = 0) const {
    const auto& v = raw(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(key, "a non-negative integer");
    auto x = v.get<std::uint64_t>();
    if (x < min) fail(key, "an integer >= " + std::to_string(min));
    return x;
  }
  double number(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_number()) fail(key, "a number");
    return v.get<double>();
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& expected) {
    throw ConfigError("config key '" + key + "' must be " + expected);
  }

 private:
  std::map<std::string, json> values_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  std::map<std::string, json> given;
  flatten(doc, "", given);

  std::map<std::string, json> values;
  for (const auto& k : config_keys()) values.emplace(k.key, json::parse(k.default_value));
  for (auto& [k, v] : given) {
    auto it = values.find(k);
    if (it == values.end()) throw ConfigError("unknown config key '" + k + "'");
    it->second = v;
  }
  Reader r(std::move(values));

  RunConfig c;
  c.nodes_path = resolve(base_dir, r.str("dataset.nodes"));
  c.edges_path = resolve(base_dir, r.str("dataset.edges"));
  if (c.nodes_path.empty() || c.edges_path.empty())
    throw ConfigError("dataset.nodes and dataset.edges are required");
  c.run_dir = resolve(base_dir, r.str("run_dir"));
  if (c.run_dir.empty()) throw ConfigError("run_dir must not be empty");
  c.seed = r.count("seed");

  c.gse_enabled = r.boolean("gse.enabled");
  c.gse_k_max = r.count("gse.k_max", 1);
  c.gse_epsilon = r.number("gse.epsilon");
  if (!(c.gse_epsilon > 0.0)) Reader::fail("gse.epsilon", "> 0");
  c.gse_exact_threshold = r.count("gse.exact_threshold", 1);

  const auto height = r.raw("tree.height");
  if (!height.is_number_integer() || height.get<std::int64_t>() <= 1) Reader::fail("tree.height", "an integer > 1");
  c.tree_height = height.get<int>();
  c.tree_audit = r.boolean("tree.audit");

  const auto mode = r.str("llm.mode");
  if (mode == "mock") c.llm_mode = LlmMode::Mock;
  else if (mode == "live") c.llm_mode = LlmMode::Live;
  else Reader::fail("llm.mode", "\"mock\" or \"live\"");
  c.llm.base_url = r.str("llm.base_url");
  c.llm.model = r.str("llm.model");
  c.llm.api_key_env = r.str("llm.api_key_env");
  c.llm.temperature = r.number("llm.temperature");
  c.llm.max_tokens = r.count("llm.max_tokens", 1);
  c.llm.max_inflight = r.count("llm.max_inflight", 1);
  c.llm.timeout_seconds = r.number("llm.timeout_seconds");
  c.llm.retries = r.count("llm.retries");
  c.llm.backoff_seconds = r.number("llm.backoff_seconds");
  c.llm.validate();
  c.llm_context_budget = r.count("llm.context_budget", 1);
  c.llm_fallback = r.boolean("llm.fallback");
  c.llm_mock_char_limit = r.count("llm.mock_char_limit", 1);

  c.infer_context_budget = r.count("infer.context_budget", 1);
  c.infer_categories_path = resolve(base_dir, r.str("infer.categories_path"));

  c.baseline_budget = r.count("baseline.budget");
  c.baseline_mss_cap = static_cast<std::uint32_t>(r.count("baseline.mss_cap", 1));

  const auto& ref = r.raw("metrics.reference_gci");
  if (!ref.is_null()) {
    if (!ref.is_number() || !(ref.get<double>() > 0.0)) Reader::fail("metrics.reference_gci", "null or a number > 0");
    c.reference_gci = ref.get<double>();
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["dataset.nodes"] = nodes_path.string();
  j["dataset.edges"] = edges_path.string();
  j["run_dir"] = run_dir.string();
  j["seed"] = seed;
  j["gse.enabled"] = gse_enabled;
  j["gse.k_max"] = gse_k_max;
  j["gse.epsilon"] = gse_epsilon;
  j["gse.exact_threshold"] = gse_exact_threshold;
  j["tree.height"] = tree_height;
  j["tree.audit"] = tree_audit;
  j["llm.mode"] = llm_mode == LlmMode::Mock ? "mock" : "live";
  j["llm.base_url"] = llm.base_url;
  j["llm.model"] = llm.model;
  j["llm.api_key_env"] = llm.api_key_env;
  j["llm.temperature"] = llm.temperature;
  j["llm.max_tokens"] = llm.max_tokens;
  j["llm.context_budget"] = llm_context_budget;
  j["llm.max_inflight"] = llm.max_inflight;
  j["llm.timeout_seconds"] = llm.timeout_seconds;
  j["llm.retries"] = llm.retries;
  j["llm.backoff_seconds"] = llm.backoff_seconds;
  j["llm.fallback"] = llm_fallback;
  j["llm.mock_char_limit"] = llm_mock_char_limit;
  j["infer.context_budget"] = infer_context_budget;
  j["infer.categories_path"] = infer_categories_path.string();
  j["baseline.budget"] = baseline_budget;
  j["baseline.mss_cap"] = baseline_mss_cap;
  j["metrics.reference_gci"] = reference_gci ? nlohmann::ordered_json(*reference_gci) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace tagc
