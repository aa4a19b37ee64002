#include "tagc/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "tagc/baselines.hpp"
#include "tagc/config.hpp"
#include "tagc/error.hpp"
#include "tagc/pipeline.hpp"

namespace tagc {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string stage;
  bool mock_llm = false;
};

RunConfig resolve_config(const Common& c) {
  if (c.config_path.empty()) throw ConfigError("--config is required");
  auto cfg = load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.mock_llm) cfg.llm_mode = LlmMode::Mock;
  return cfg;
}

std::string opt(const std::optional<double>& v, const char* spec) {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string("-");
}

void print_report(const EvalReport& r, std::ostream& out) {
  out << fmt::format("method        {}\n", r.method);
  out << fmt::format("ACC           {:.2f}%\n", r.acc);
  out << fmt::format("GCR           {:.4f}%\n", 100.0 * r.gcr);
  out << fmt::format("GCI           {:.2f}\n", r.gci);
  out << fmt::format("GCI (norm)    {}\n", opt(r.gci_norm, "{:.2f}"));
  out << fmt::format("H_S           {}\n", opt(r.h_s, "{:.4f}"));
  out << fmt::format("memory        {} bytes\n", r.memory_bytes);
  out << fmt::format("nodes         {} -> {} ({} targets, {} condensed)\n", r.counts.original_nodes,
                     r.counts.compressed_nodes, r.counts.targets, r.counts.condensed_nodes);
  out << fmt::format("edges         {} -> {}\n", r.counts.original_edges, r.counts.compressed_edges);
  out << fmt::format("unparsed      {}\n", r.unparsed);
  for (const auto& [stage, ms] : r.timings_ms) out << fmt::format("  {:<12}{:>10.1f} ms\n", stage, ms);
}

void print_stages(const RunResult& result, std::ostream& out) {
  for (const auto& s : result.stages)
    out << fmt::format("{:<12} {}\n", to_string(s.stage),
                       s.executed ? fmt::format("done in {:.1f} ms", s.elapsed_ms) : std::string("up to date"));
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
  if (!out) throw Error("cannot write " + p.string());
}

int cmd_pipeline(const Common& c, Stage last, std::ostream& out) {
  auto cfg = resolve_config(c);
  if (!c.stage.empty()) {
    Stage requested = stage_from_string(c.stage);
    if (static_cast<int>(requested) > static_cast<int>(last))
      throw ConfigError(fmt::format("stage '{}' lies beyond this subcommand", c.stage));
    last = requested;
  }
  auto result = run_pipeline(cfg, last);
  print_stages(result, out);
  if (result.report) {
    out << "\n";
    print_report(*result.report, out);
  }
  return kExitOk;
}

int cmd_baseline(const Common& c, const std::string& method, std::ostream& out) {
  auto cfg = resolve_config(c);
  if (method == "hs2c") return cmd_pipeline(c, Stage::Metrics, out);

  auto tag = load_tag(cfg.nodes_path, cfg.edges_path);
  tag.validate();
  BaselineSettings s;
  s.budget = cfg.baseline_budget;
  s.mss_cap = cfg.baseline_mss_cap;
  s.seed = cfg.seed;
  s.categories = cfg.infer_categories_path.empty() ? categories_from_labels(tag) : read_categories(cfg.infer_categories_path);
  s.aggregation = {cfg.llm_context_budget, cfg.llm_fallback, cfg.llm_mock_char_limit, cfg.llm.max_inflight};
  s.infer = {cfg.infer_context_budget, cfg.llm.max_inflight};
  s.reference_gci = cfg.reference_gci;
  s.gse_enabled = cfg.gse_enabled;
  s.k_max = cfg.gse_k_max;
  s.epsilon = cfg.gse_epsilon;
  s.tree_height = cfg.tree_height;
  s.exact_threshold = cfg.gse_exact_threshold;

  const fs::path dir = cfg.run_dir / ("baseline-" + method);
  fs::create_directories(dir);
  std::unique_ptr<LlmClient> client;
  if (cfg.llm_mode == LlmMode::Mock) client = std::make_unique<MockLlm>(cfg.llm_mock_char_limit);
  else client = std::make_unique<HttpLlm>(cfg.llm);
  ResponseCache agg_cache(dir / "aggregation_cache.jsonl", "summary");
  ResponseCache cls_cache(dir / "classification_cache.jsonl", "answer");
  std::vector<Prediction> predictions;
  auto start = std::chrono::steady_clock::now();
  EvalReport report;
  try {
    report = run_baseline_eval(tag, method, s, *client, &agg_cache, &cls_cache, &predictions);
  } catch (const TransportError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  } catch (const std::exception& e) {
    throw StageError("baseline", e.what());
  }
  report.timings_ms = {
      {"baseline", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};

  std::string lines;
  for (const auto& p : predictions) {
    nlohmann::ordered_json j;
    j["id"] = p.external_id;
    j["pred"] = p.pred ? nlohmann::ordered_json(*p.pred) : nlohmann::ordered_json(nullptr);
    j["gold"] = p.gold;
    j["raw_answer"] = p.raw_answer;
    j["status"] = to_string(p.status);
    j["neighbors_included"] = p.neighbors_included;
    j["neighbors_dropped"] = p.neighbors_dropped;
    lines += j.dump() + "\n";
  }
  write_text(dir / "predictions.jsonl", lines);
  write_text(dir / "metrics.json", report.metrics_json().dump(2) + "\n");
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  print_report(report, out);
  return kExitOk;
}

struct FormulaArgs {
  std::optional<double> acc;
  std::optional<double> gcr_percent;
  std::optional<std::size_t> compressed;
  std::optional<std::size_t> original;
  std::optional<double> reference;
};

int cmd_metrics(const std::string& run_dir, const FormulaArgs& f, std::ostream& out) {
  if (!run_dir.empty()) {
    auto p = fs::path(run_dir) / "report.json";
    std::ifstream in(p);
    if (!in) throw ValidationError("missing artifact " + p.string());
    auto report = EvalReport::from_json(nlohmann::json::parse(in));
    check_report_identities(report);
    print_report(report, out);
    return kExitOk;
  }
  // Formula mode: recompute the ratios from raw numbers.
  double ratio;
  if (f.compressed && f.original) ratio = gcr(*f.compressed, *f.original);
  else if (f.gcr_percent) ratio = *f.gcr_percent / 100.0;
  else throw ConfigError("metrics needs a run directory, --gcr, or --compressed with --original");
  out << fmt::format("GCR           {:.4f}%\n", 100.0 * ratio);
  out << fmt::format("compression   {:.4f}%\n", 100.0 * (1.0 - ratio));
  if (f.acc) {
    double index = gci(*f.acc, ratio);
    out << fmt::format("GCI           {:.4f}\n", index);
    if (f.reference) out << fmt::format("GCI (norm)    {:.4f}\n", normalized_gci(index, *f.reference));
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-guided compression of text-attributed graphs for LLM node classification", "tagc"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_stage) {
    sub->add_option("--config", common.config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "override the configured seed");
    if (with_stage) sub->add_option("--stage", common.stage, "stop after this stage");
    sub->add_flag("--mock-llm", common.mock_llm, "use the deterministic mock instead of the configured endpoint");
  };

  auto* compress = app.add_subcommand("compress", "enhance, partition, aggregate and rebuild the graph");
  add_common(compress, true);
  auto* classify = app.add_subcommand("classify", "run every stage through classification and metrics");
  add_common(classify, true);

  std::string method;
  auto* baseline = app.add_subcommand("baseline", "evaluate one comparison method");
  add_common(baseline, false);
  baseline->add_option("--method", method, "random|degree|number|rag|skeleton-alpha|skeleton-beta|skeleton-gamma|hs2c")
      ->required();

  std::string metrics_dir;
  FormulaArgs formula;
  auto* metrics = app.add_subcommand("metrics", "print a run's report, or evaluate the metric formulas");
  metrics->add_option("run_dir", metrics_dir, "run directory holding report.json");
  metrics->add_option("--acc", formula.acc, "accuracy in percent");
  metrics->add_option("--gcr", formula.gcr_percent, "compression ratio in percent");
  metrics->add_option("--compressed", formula.compressed, "compressed node count");
  metrics->add_option("--original", formula.original, "original node count");
  metrics->add_option("--ref", formula.reference, "reference GCI for normalization");

  std::string inspect_what;
  std::string inspect_dir;
  auto* insp = app.add_subcommand("inspect", "summarize a run directory");
  insp->add_option("what", inspect_what, "communities|compressed|predictions")->required();
  insp->add_option("run_dir", inspect_dir, "run directory")->required();

  auto* config = app.add_subcommand("config", "list every configuration key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.what());
      return kExitOk;
    }
    err << "tagc: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (compress->parsed()) return cmd_pipeline(common, Stage::Reconstruct, out);
    if (classify->parsed()) return cmd_pipeline(common, Stage::Metrics, out);
    if (baseline->parsed()) return cmd_baseline(common, method, out);
    if (metrics->parsed()) return cmd_metrics(metrics_dir, formula, out);
    if (insp->parsed()) {
      inspect(inspect_dir, inspect_what_from_string(inspect_what), out);
      return kExitOk;
    }
    if (config->parsed()) {
      for (const auto& k : config_keys()) out << fmt::format("{:<24}{:<30}{}\n", k.key, k.default_value, k.help);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "tagc: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TransportError& e) {
    err << "tagc: LLM transport failed: " << e.what() << "\n";
    return kExitTransport;
  } catch (const StageError& e) {
    err << "tagc: stage '" << e.stage() << "' failed: " << e.what() << "\n";
    return kExitStage;
  } catch (const ValidationError& e) {
    err << "tagc: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    err << "tagc: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}

}  // namespace tagc
