#include "tagc/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "tagc/error.hpp"
#include "tagc/tokens.hpp"

namespace tagc {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

PartitionResult enhance_and_partition(const TagGraph& graph, const PartitionOptions& opts) {
  PartitionResult r;
  if (opts.gse_enabled) {
    graph.require_features();
    const std::size_t k_max = std::min(opts.k_max, graph.size() - 1);
    r.selection = select_k(graph, k_max, opts.epsilon, opts.similarity);
    r.enhanced = enhance(graph, r.selection->k_m, opts.similarity);
  } else {
    r.enhanced = EnhancedGraph::unchanged(graph);
  }
  auto tree = build_coding_tree(r.enhanced.graph, opts.tree, &r.tree_stats);
  r.tree_entropy = tree.entropy();
  r.partition = finest_partition(tree);
  return r;
}

std::vector<std::vector<NodeId>> member_lists(std::span<const TypedCommunity> communities) {
  std::vector<std::vector<NodeId>> out;
  out.reserve(communities.size());
  for (const auto& c : communities) out.push_back(c.members);
  return out;
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::Enhance,     Stage::Partition, Stage::Type,   Stage::Aggregate,
                                            Stage::Reconstruct, Stage::Infer,     Stage::Metrics};
  return stages;
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::Enhance: return "enhance";
    case Stage::Partition: return "partition";
    case Stage::Type: return "type";
    case Stage::Aggregate: return "aggregate";
    case Stage::Reconstruct: return "reconstruct";
    case Stage::Infer: return "infer";
    case Stage::Metrics: return "metrics";
  }
  return "?";
}

std::uint64_t stage_seed(std::uint64_t master, Stage stage) {
  return mix_seed(master ^ mix_seed(0x5eed0000ull + static_cast<std::uint64_t>(stage)));
}

Stage stage_from_string(const std::string& s) {
  for (Stage st : all_stages())
    if (s == to_string(st)) return st;
  throw ConfigError("unknown stage '" + s + "'");
}

InspectWhat inspect_what_from_string(const std::string& s) {
  if (s == "communities") return InspectWhat::Communities;
  if (s == "compressed") return InspectWhat::Compressed;
  if (s == "predictions") return InspectWhat::Predictions;
  throw ConfigError("inspect target must be communities, compressed or predictions, not '" + s + "'");
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file and rename so readers never see half a file.
void write_file(const fs::path& p, const std::string& content) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

void write_json(const fs::path& p, const ordered_json& j) { write_file(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw ParseError(p.string(), 0, e.what());
  }
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError(p.string(), lineno, e.what());
    }
  }
  return out;
}

std::vector<std::string> stage_artifacts(Stage s) {
  switch (s) {
    case Stage::Enhance: return {"id_map.csv", "edges_enhanced.csv", "edges_knn.csv", "enhance.json"};
    case Stage::Partition: return {"partition.jsonl", "tree_stats.json"};
    case Stage::Type: return {"communities.jsonl", "homophily.json"};
    case Stage::Aggregate: return {"summaries.jsonl"};
    case Stage::Reconstruct:
      return {"compressed_nodes.jsonl", "compressed_edges.csv", "provenance.jsonl", "compression.json"};
    case Stage::Infer: return {"predictions.jsonl"};
    case Stage::Metrics: return {"metrics.json", "report.json"};
  }
  return {};
}

// Everything the stages hand to each other.
struct State {
  TagGraph tag;
  std::unordered_map<std::int64_t, NodeId> dense;
  std::vector<std::int64_t> external;
  EnhancedGraph enhanced;
  std::size_t k_m = 0;
  std::vector<Community> partition;
  std::vector<TypedCommunity> typed;
  std::optional<double> h_s;
  std::map<std::uint32_t, std::string> summaries;
  CompressedGraph compressed;
  std::vector<std::string> categories;
  std::vector<Prediction> predictions;
  std::optional<EvalReport> report;
};

NodeId to_dense(const State& st, std::int64_t ext, const fs::path& file) {
  auto it = st.dense.find(ext);
  if (it == st.dense.end()) throw ParseError(file.string(), 0, "unknown node id " + std::to_string(ext));
  return it->second;
}

std::vector<std::int64_t> to_external(const State& st, std::span<const NodeId> ids) {
  std::vector<std::int64_t> out;
  out.reserve(ids.size());
  for (NodeId v : ids) out.push_back(st.external[v]);
  return out;
}

std::unique_ptr<LlmClient> make_client(const RunConfig& c) {
  if (c.llm_mode == LlmMode::Mock) return std::make_unique<MockLlm>(c.llm_mock_char_limit);
  return std::make_unique<HttpLlm>(c.llm);
}

class Runner {
 public:
  Runner(const RunConfig& config) : c_(config), dir_(config.run_dir), stamp_dir_(dir_ / ".stages") {}

  RunResult run(Stage last) {
    fs::create_directories(stamp_dir_);
    st_.tag = load_tag(c_.nodes_path, c_.edges_path);
    st_.tag.validate();
    for (const auto& n : st_.tag.nodes) {
      st_.dense.emplace(n.external_id, n.id);
      st_.external.push_back(n.external_id);
    }
    dataset_digest_ = sha256_hex(read_file(c_.nodes_path) + '\0' + read_file(c_.edges_path));

    RunResult result;
    bool forced = false;
    std::string upstream;
    for (Stage s : all_stages()) {
      const std::string stamp = sha256_hex(std::string(to_string(s)) + '\0' + params(s).dump() + '\0' + upstream);
      upstream = stamp;
      StageOutcome outcome{s, false, 0.0};
      if (!forced && is_current(s, stamp)) {
        guarded(s, [&] { load(s); });
      } else {
        fs::remove(stamp_path(s));
        auto start = std::chrono::steady_clock::now();
        guarded(s, [&] { execute(s); });
        outcome.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        outcome.executed = true;
        forced = true;
        ordered_json j;
        j["stamp"] = stamp;
        j["elapsed_ms"] = outcome.elapsed_ms;
        write_json(stamp_path(s), j);
        if (s == Stage::Metrics) finish_report();
      }
      result.stages.push_back(outcome);
      if (s == last) break;
    }
    result.report = st_.report;
    return result;
  }

 private:
  fs::path artifact(const std::string& name) const { return dir_ / name; }
  fs::path stamp_path(Stage s) const { return stamp_dir_ / (std::string(to_string(s)) + ".json"); }

  bool is_current(Stage s, const std::string& stamp) const {
    if (!fs::exists(stamp_path(s))) return false;
    for (const auto& a : stage_artifacts(s))
      if (!fs::exists(artifact(a))) return false;
    try {
      return read_json(stamp_path(s)).at("stamp").get<std::string>() == stamp;
    } catch (const std::exception&) {
      return false;
    }
  }

  template <typename Fn>
  void guarded(Stage s, Fn&& fn) {
    try {
      fn();
    } catch (const TransportError& e) {
      throw TransportError(std::string("stage '") + to_string(s) + "': " + e.what());
    } catch (const ConfigError&) {
      throw;
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(to_string(s), e.what());
    }
  }

  // Inputs that decide a stage's output besides its upstream stages.
  ordered_json params(Stage s) const {
    auto cfg = c_.to_json();
    ordered_json p = ordered_json::object();
    auto take = [&](std::initializer_list<const char*> keys) {
      for (const char* k : keys) p[k] = cfg[k];
    };
    switch (s) {
      case Stage::Enhance:
        p["dataset"] = dataset_digest_;
        take({"seed", "gse.enabled", "gse.k_max", "gse.epsilon", "gse.exact_threshold"});
        break;
      case Stage::Partition: take({"tree.height"}); break;
      case Stage::Type: break;
      case Stage::Aggregate:
        take({"llm.mode", "llm.model", "llm.base_url", "llm.temperature", "llm.max_tokens", "llm.context_budget",
              "llm.fallback", "llm.mock_char_limit"});
        break;
      case Stage::Reconstruct: break;
      case Stage::Infer:
        take({"llm.mode", "llm.model", "llm.base_url", "llm.temperature", "llm.max_tokens", "infer.context_budget"});
        p["categories"] = categories();
        break;
      case Stage::Metrics: take({"metrics.reference_gci"}); break;
    }
    return p;
  }

  const std::vector<std::string>& categories() const {
    if (!categories_)
      categories_ = c_.infer_categories_path.empty() ? categories_from_labels(st_.tag)
                                                     : read_categories(c_.infer_categories_path);
    return *categories_;
  }

  LlmClient& client() {
    if (!client_) client_ = make_client(c_);
    return *client_;
  }

  void execute(Stage s) {
    switch (s) {
      case Stage::Enhance: return run_enhance();
      case Stage::Partition: return run_partition();
      case Stage::Type: return run_type();
      case Stage::Aggregate: return run_aggregate();
      case Stage::Reconstruct: return run_reconstruct();
      case Stage::Infer: return run_infer();
      case Stage::Metrics: return run_metrics();
    }
  }

  void load(Stage s) {
    switch (s) {
      case Stage::Enhance: return load_enhance();
      case Stage::Partition: return load_partition();
      case Stage::Type: return compute_type();
      case Stage::Aggregate: return load_aggregate();
      case Stage::Reconstruct: return compute_reconstruct();
      case Stage::Infer: return load_infer();
      case Stage::Metrics: return load_metrics();
    }
  }

  // ---- enhance ----------------------------------------------------------

  void run_enhance() {
    ordered_json info;
    info["enabled"] = c_.gse_enabled;
    if (c_.gse_enabled) {
      st_.tag.require_features();
      SimilarityOptions sim;
      sim.exact_threshold = c_.gse_exact_threshold;
      sim.seed = stage_seed(c_.seed, Stage::Enhance);
      const std::size_t k_max = std::min(c_.gse_k_max, st_.tag.size() - 1);
      auto sel = select_k(st_.tag, k_max, c_.gse_epsilon, sim);
      st_.enhanced = enhance(st_.tag, sel.k_m, sim);
      st_.k_m = sel.k_m;
      info["k_m"] = sel.k_m;
      info["entropy_by_k"] = sel.entropy;
    } else {
      st_.enhanced = EnhancedGraph::unchanged(st_.tag);
      info["k_m"] = 0;
    }
    info["original_edges"] = st_.tag.topology.num_edges();
    info["augmented_edges"] = st_.enhanced.augmented_edges();
    info["enhanced_edges"] = st_.enhanced.graph.num_edges();

    write_id_map(st_.tag, artifact("id_map.csv"));
    write_edges_csv(artifact("edges_enhanced.csv"), st_.enhanced.graph.edges(), st_.external, true);
    write_edges_csv(artifact("edges_knn.csv"), st_.enhanced.knn_edges(), st_.external, true);
    write_json(artifact("enhance.json"), info);
  }

  void load_enhance() {
    auto info = read_json(artifact("enhance.json"));
    st_.k_m = info.at("k_m").get<std::size_t>();
    std::vector<Edge> edges;
    const auto path = artifact("edges_enhanced.csv");
    for (const auto& r : read_edges_csv(path))
      edges.push_back({to_dense(st_, r.src, path), to_dense(st_, r.dst, path), r.w, r.origin});
    st_.enhanced = EnhancedGraph{&st_.tag, WeightedGraph(st_.tag.size(), std::move(edges)), st_.k_m};
  }

  // ---- partition --------------------------------------------------------

  void run_partition() {
    TreeBuildOptions opts;
    opts.height = c_.tree_height;
    opts.seed = stage_seed(c_.seed, Stage::Partition);
    opts.audit = c_.tree_audit;
    TreeBuildStats stats;
    auto tree = build_coding_tree(st_.enhanced.graph, opts, &stats);
    st_.partition = finest_partition(tree);

    std::string lines;
    for (const auto& c : st_.partition) {
      ordered_json j;
      j["id"] = c.id;
      j["members"] = to_external(st_, c.members);
      lines += j.dump() + "\n";
    }
    write_file(artifact("partition.jsonl"), lines);
    ordered_json s;
    s["height"] = c_.tree_height;
    s["communities"] = st_.partition.size();
    s["merges"] = stats.merges;
    s["drops"] = stats.drops;
    s["candidate_evaluations"] = stats.candidate_evaluations;
    s["height_after_merge"] = stats.height_after_merge;
    s["entropy_one_dim"] = stats.entropy_one_dim;
    s["entropy_after_merge"] = stats.entropy_after_merge;
    s["entropy_final"] = stats.entropy_final;
    write_json(artifact("tree_stats.json"), s);
  }

  void load_partition() {
    const auto path = artifact("partition.jsonl");
    st_.partition.clear();
    for (const auto& j : read_jsonl(path)) {
      Community c;
      c.id = j.at("id").get<std::uint32_t>();
      for (auto ext : j.at("members").get<std::vector<std::int64_t>>()) c.members.push_back(to_dense(st_, ext, path));
      std::sort(c.members.begin(), c.members.end());
      st_.partition.push_back(std::move(c));
    }
  }

  // ---- type -------------------------------------------------------------

  HomophilyReport compute_type_and_homophily() {
    st_.typed = type_communities(st_.partition, st_.tag);
    HomophilyReport rep;
    try {
      rep = partition_homophily(member_lists(st_.typed), st_.tag);
      st_.h_s = rep.mean;
    } catch (const ValidationError&) {
      st_.h_s.reset();
    }
    return rep;
  }

  void compute_type() { compute_type_and_homophily(); }

  void run_type() {
    auto rep = compute_type_and_homophily();
    std::string lines;
    for (std::size_t i = 0; i < st_.typed.size(); ++i) {
      const auto& c = st_.typed[i];
      ordered_json j;
      j["id"] = c.id;
      j["type"] = to_string(c.type);
      j["members"] = to_external(st_, c.members);
      j["targets"] = c.target_count;
      j["backgrounds"] = c.background_count;
      j["retained"] = c.target_count > 0;
      if (st_.h_s) {
        j["homophily"] = rep.per_community[i].score;
        j["majority_label"] = rep.per_community[i].majority_label;
      } else {
        j["homophily"] = nullptr;
        j["majority_label"] = nullptr;
      }
      lines += j.dump() + "\n";
    }
    write_file(artifact("communities.jsonl"), lines);
    ordered_json h;
    h["h_s"] = st_.h_s ? ordered_json(*st_.h_s) : ordered_json(nullptr);
    h["size_weighted"] = st_.h_s ? ordered_json(rep.size_weighted) : ordered_json(nullptr);
    h["skipped_unlabeled"] = rep.skipped_unlabeled;
    h["communities"] = st_.typed.size();
    std::map<std::string, std::size_t> by_type;
    for (const auto& c : st_.typed) ++by_type[to_string(c.type)];
    h["by_type"] = by_type;
    write_json(artifact("homophily.json"), h);
  }

  // ---- aggregate --------------------------------------------------------

  void run_aggregate() {
    auto retained = retain_communities(st_.typed);
    auto jobs = make_jobs(retained, st_.tag);
    ResponseCache cache(artifact("aggregation_cache.jsonl"), "summary");
    AggregationOptions opts;
    opts.context_budget = c_.llm_context_budget;
    opts.fallback_to_mock = c_.llm_fallback;
    opts.mock_char_limit = c_.llm_mock_char_limit;
    opts.max_inflight = c_.llm.max_inflight;
    auto results = aggregate_all(jobs, client(), &cache, opts);

    st_.summaries.clear();
    std::string lines;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      st_.summaries[r.community_id] = r.summary;
      ordered_json j;
      j["community"] = r.community_id;
      j["type"] = to_string(jobs[i].type);
      j["hash"] = r.hash;
      j["summary"] = r.summary;
      j["prompt_tokens"] = r.prompt_tokens;
      j["completion_tokens"] = r.completion_tokens;
      j["latency_ms"] = r.latency_ms;
      j["requests"] = r.requests;
      j["cached"] = r.cached;
      j["fallback"] = r.fell_back;
      lines += j.dump() + "\n";
    }
    write_file(artifact("summaries.jsonl"), lines);
  }

  void load_aggregate() {
    st_.summaries.clear();
    for (const auto& j : read_jsonl(artifact("summaries.jsonl")))
      st_.summaries[j.at("community").get<std::uint32_t>()] = j.at("summary").get<std::string>();
  }

  // ---- reconstruct ------------------------------------------------------

  void compute_reconstruct() { st_.compressed = reconstruct(st_.enhanced, st_.typed, st_.summaries); }

  void run_reconstruct() {
    compute_reconstruct();
    const auto& cg = st_.compressed;
    write_compressed(cg, st_.tag, artifact("compressed_nodes.jsonl"), artifact("compressed_edges.csv"),
                     artifact("provenance.jsonl"));
    ordered_json j;
    j["gcr"] = gcr(cg, st_.tag);
    j["original_nodes"] = st_.tag.size();
    j["compressed_nodes"] = cg.num_nodes();
    j["targets"] = cg.targets.size();
    j["condensed_nodes"] = cg.condensed.size();
    j["dropped_nodes"] = cg.dropped_nodes.size();
    j["enhanced_edges"] = st_.enhanced.graph.num_edges();
    j["compressed_edges"] = cg.edges.size();
    j["enhanced_edge_weight"] = st_.enhanced.graph.total_weight();
    j["compressed_edge_weight"] = cg.total_edge_weight();
    j["absorbed_weight"] = cg.total_absorbed();
    j["dropped_weight"] = cg.dropped_weight;
    j["dropped_edges"] = cg.dropped_edges;
    j["memory_bytes"] = estimate_memory(compressed_bundle(cg, st_.tag));
    write_json(artifact("compression.json"), j);
  }

  // ---- infer ------------------------------------------------------------

  void run_infer() {
    ResponseCache cache(artifact("classification_cache.jsonl"), "answer");
    InferOptions opts;
    opts.context_budget = c_.infer_context_budget;
    opts.max_inflight = c_.llm.max_inflight;
    st_.predictions = classify_targets(st_.compressed, st_.tag, categories(), client(), &cache, opts);
    std::string lines;
    for (const auto& p : st_.predictions) {
      ordered_json j;
      j["id"] = p.external_id;
      j["pred"] = p.pred ? ordered_json(*p.pred) : ordered_json(nullptr);
      j["gold"] = p.gold;
      j["raw_answer"] = p.raw_answer;
      j["status"] = to_string(p.status);
      j["neighbors_included"] = p.neighbors_included;
      j["neighbors_dropped"] = p.neighbors_dropped;
      lines += j.dump() + "\n";
    }
    write_file(artifact("predictions.jsonl"), lines);
  }

  void load_infer() {
    const auto path = artifact("predictions.jsonl");
    st_.predictions.clear();
    for (const auto& j : read_jsonl(path)) {
      Prediction p;
      p.external_id = j.at("id").get<std::int64_t>();
      p.id = to_dense(st_, p.external_id, path);
      if (!j.at("pred").is_null()) p.pred = j["pred"].get<std::string>();
      p.gold = j.at("gold").get<std::string>();
      p.raw_answer = j.at("raw_answer").get<std::string>();
      const auto status = j.at("status").get<std::string>();
      p.status = status == "matched" ? ParseStatus::Matched
                 : status == "ambiguous_match" ? ParseStatus::AmbiguousMatch
                                               : ParseStatus::NoMatch;
      p.neighbors_included = j.value("neighbors_included", std::size_t{0});
      p.neighbors_dropped = j.value("neighbors_dropped", std::size_t{0});
      st_.predictions.push_back(std::move(p));
    }
  }

  // ---- metrics ----------------------------------------------------------

  void run_metrics() {
    auto eval = evaluate(st_.predictions, st_.tag);
    const auto& cg = st_.compressed;
    EvalCounts counts;
    counts.original_nodes = st_.tag.size();
    counts.compressed_nodes = cg.num_nodes();
    counts.original_edges = st_.tag.topology.num_edges();
    counts.compressed_edges = cg.edges.size();
    counts.targets = cg.targets.size();
    counts.condensed_nodes = cg.condensed.size();
    st_.report = make_report("hs2c", eval, counts, st_.h_s, estimate_memory(compressed_bundle(cg, st_.tag)),
                             c_.reference_gci);
    check_report_identities(*st_.report, c_.reference_gci);
    write_json(artifact("metrics.json"), st_.report->metrics_json());
  }

  // Timings come from the stamps of the runs that actually executed each
  // stage, so a partially resumed run still reports every stage.
  void finish_report() {
    st_.report->timings_ms.clear();
    for (Stage s : all_stages()) {
      double ms = 0.0;
      if (fs::exists(stamp_path(s))) ms = read_json(stamp_path(s)).value("elapsed_ms", 0.0);
      st_.report->timings_ms.emplace_back(to_string(s), ms);
    }
    write_json(artifact("report.json"), st_.report->to_json());
  }

  void load_metrics() { st_.report = EvalReport::from_json(read_json(artifact("report.json"))); }

  const RunConfig& c_;
  fs::path dir_;
  fs::path stamp_dir_;
  State st_;
  std::string dataset_digest_;
  mutable std::optional<std::vector<std::string>> categories_;
  std::unique_ptr<LlmClient> client_;
};

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

}  // namespace

RunResult run_pipeline(const RunConfig& config, Stage last) {
  Runner runner(config);
  return runner.run(last);
}

void inspect(const fs::path& run_dir, InspectWhat what, std::ostream& out) {
  if (!fs::is_directory(run_dir)) throw ValidationError("run directory " + run_dir.string() + " does not exist");
  auto need = [&](const char* name) {
    auto p = run_dir / name;
    if (!fs::exists(p)) throw ValidationError("missing artifact " + p.string());
    return p;
  };

  switch (what) {
    case InspectWhat::Communities: {
      auto rows = read_jsonl(need("communities.jsonl"));
      out << fmt::format("{:>6}  {:>6}  {:>7}  {:>11}  {:<22}  {:>8}  {}\n", "id", "size", "targets", "backgrounds",
                         "type", "H_i", "majority");
      for (const auto& r : rows) {
        std::string h = r.at("homophily").is_null() ? "-" : fmt::format("{:.4f}", r["homophily"].get<double>());
        std::string maj = r.at("majority_label").is_null() ? "-" : r["majority_label"].get<std::string>();
        out << fmt::format("{:>6}  {:>6}  {:>7}  {:>11}  {:<22}  {:>8}  {}\n", r.at("id").get<std::uint32_t>(),
                           r.at("members").size(), r.at("targets").get<std::size_t>(),
                           r.at("backgrounds").get<std::size_t>(), r.at("type").get<std::string>(), h, maj);
      }
      auto hp = run_dir / "homophily.json";
      if (fs::exists(hp)) {
        auto h = read_json(hp);
        out << "H_S = " << (h.at("h_s").is_null() ? std::string("-") : fmt::format("{:.4f}", h["h_s"].get<double>()))
            << " over " << rows.size() << " communities\n";
      }
      return;
    }
    case InspectWhat::Compressed: {
      auto j = read_json(need("compression.json"));
      for (const auto& [k, v] : j.items()) out << pad(k, 24) << v.dump() << "\n";
      auto prov = run_dir / "provenance.jsonl";
      if (fs::exists(prov)) {
        out << "\ncondensed nodes:\n";
        out << fmt::format("{:>10}  {:>9}  {:>7}  {:>9}  {:>9}\n", "id", "community", "members", "boundary",
                           "absorbed");
        for (const auto& r : read_jsonl(prov))
          out << fmt::format("{:>10}  {:>9}  {:>7}  {:>9}  {:>9}\n", r.at("id").get<std::int64_t>(),
                             r.at("community").get<std::uint32_t>(), r.at("members").size(),
                             r.at("boundary_weight").get<double>(), r.at("absorbed_weight").get<double>());
      }
      return;
    }
    case InspectWhat::Predictions: {
      auto rows = read_jsonl(need("predictions.jsonl"));
      std::map<std::string, std::map<std::string, std::size_t>> confusion;
      std::set<std::string> columns;
      std::size_t correct = 0;
      for (const auto& r : rows) {
        auto gold = r.at("gold").get<std::string>();
        auto pred = r.at("pred").is_null() ? std::string("(none)") : r["pred"].get<std::string>();
        ++confusion[gold][pred];
        columns.insert(pred);
        columns.insert(gold);
        correct += pred == gold;
      }
      std::size_t w = 13;
      for (const auto& c : columns) w = std::max(w, c.size() + 2);
      out << pad("gold \\ pred", w);
      for (const auto& c : columns) out << pad(c, w);
      out << pad("total", w) << "\n";
      for (const auto& [gold, row] : confusion) {
        out << pad(gold, w);
        std::size_t total = 0;
        for (const auto& c : columns) {
          auto it = row.find(c);
          std::size_t n = it == row.end() ? 0 : it->second;
          total += n;
          out << pad(std::to_string(n), w);
        }
        out << pad(std::to_string(total), w) << "\n";
      }
      double acc = rows.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(rows.size());
      out << fmt::format("\nACC = {:.2f}% ({}/{})\n", acc, correct, rows.size());
      return;
    }
  }
}

}  // namespace tagc
