#include "tagc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "tagc/community.hpp"
#include "tagc/error.hpp"
#include "tagc/pipeline.hpp"
#include "tagc/tokens.hpp"

namespace tagc {

SamplingStrategy sampling_strategy_from_string(const std::string& s) {
  if (s == "random") return SamplingStrategy::Random;
  if (s == "degree") return SamplingStrategy::Degree;
  if (s == "number") return SamplingStrategy::Number;
  if (s == "rag") return SamplingStrategy::Rag;
  throw ValidationError("unknown sampling strategy '" + s + "'");
}

const char* to_string(SamplingStrategy s) {
  switch (s) {
    case SamplingStrategy::Random: return "random";
    case SamplingStrategy::Degree: return "degree";
    case SamplingStrategy::Number: return "number";
    case SamplingStrategy::Rag: return "rag";
  }
  return "?";
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::vector<NodeId> strategy_order(const TagGraph& graph, NodeId target, SamplingStrategy strategy,
                                   std::uint64_t seed) {
  std::vector<NodeId> nbrs;
  for (const auto& nb : graph.topology.neighbors(target)) nbrs.push_back(nb.node);
  switch (strategy) {
    case SamplingStrategy::Random: {
      std::mt19937_64 gen(mix_seed(seed ^ mix_seed(target)));
      for (std::size_t i = nbrs.size(); i > 1; --i) std::swap(nbrs[i - 1], nbrs[bounded(gen, i)]);
      break;
    }
    case SamplingStrategy::Degree:
      std::stable_sort(nbrs.begin(), nbrs.end(), [&](NodeId a, NodeId b) {
        return graph.topology.degree(a) > graph.topology.degree(b);
      });
      break;
    case SamplingStrategy::Number: {
      std::map<NodeId, std::size_t> len;
      for (NodeId v : nbrs) len[v] = estimate_tokens(graph.nodes[v].text);
      std::stable_sort(nbrs.begin(), nbrs.end(), [&](NodeId a, NodeId b) { return len[a] < len[b]; });
      break;
    }
    case SamplingStrategy::Rag: {
      const auto& tf = graph.nodes[target].feature;
      if (tf.empty()) throw MissingFeatures("rag sampling: target " + std::to_string(target) + " has no feature");
      std::map<NodeId, double> sim;
      for (NodeId v : nbrs) {
        const auto& f = graph.nodes[v].feature;
        if (f.size() != tf.size()) throw MissingFeatures("rag sampling: node " + std::to_string(v) + " has no feature");
        sim[v] = cosine(tf, f);
      }
      std::stable_sort(nbrs.begin(), nbrs.end(), [&](NodeId a, NodeId b) { return sim[a] > sim[b]; });
      break;
    }
  }
  return nbrs;
}

std::optional<double> try_homophily(const std::vector<std::vector<NodeId>>& groups, const TagGraph& graph) {
  if (groups.empty()) return std::nullopt;
  try {
    return partition_homophily(groups, graph).mean;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

std::optional<SkeletonVariant> skeleton_variant(const std::string& method) {
  if (method == "skeleton-alpha" || method == "skeleton-α") return SkeletonVariant::Alpha;
  if (method == "skeleton-beta" || method == "skeleton-β") return SkeletonVariant::Beta;
  if (method == "skeleton-gamma" || method == "skeleton-γ") return SkeletonVariant::Gamma;
  return std::nullopt;
}

EvalReport report_for_compressed(const std::string& method, const CompressedGraph& compressed, const TagGraph& graph,
                                 std::optional<double> h_s, const BaselineSettings& settings, LlmClient& client,
                                 ResponseCache* cache, std::vector<Prediction>* predictions) {
  auto preds = classify_targets(compressed, graph, settings.categories, client, cache, settings.infer);
  auto eval = evaluate(preds, graph);
  EvalCounts counts;
  counts.original_nodes = graph.size();
  counts.compressed_nodes = compressed.num_nodes();
  counts.original_edges = graph.topology.num_edges();
  counts.compressed_edges = compressed.edges.size();
  counts.targets = compressed.targets.size();
  counts.condensed_nodes = compressed.condensed.size();
  auto report = make_report(method, eval, counts, h_s, estimate_memory(compressed_bundle(compressed, graph)),
                            settings.reference_gci);
  if (predictions) *predictions = std::move(preds);
  return report;
}

}  // namespace

std::vector<NodeId> sample_neighbors(const TagGraph& graph, NodeId target, SamplingStrategy strategy,
                                     std::size_t budget, std::uint64_t seed) {
  if (target >= graph.size()) throw ValidationError("unknown target " + std::to_string(target));
  std::vector<NodeId> out;
  std::size_t used = 0;
  for (NodeId v : strategy_order(graph, target, strategy, seed)) {
    auto cost = estimate_tokens(graph.nodes[v].text);
    if (used + cost > budget) break;
    used += cost;
    out.push_back(v);
  }
  return out;
}

SampleBundle build_sample_bundle(const TagGraph& graph, SamplingStrategy strategy, std::size_t budget,
                                 std::uint64_t seed) {
  SampleBundle b;
  std::vector<std::uint8_t> in(graph.size(), 0);
  for (const auto& n : graph.nodes) {
    if (!n.is_target()) continue;
    auto picked = sample_neighbors(graph, n.id, strategy, budget, seed);
    in[n.id] = 1;
    for (NodeId v : picked) in[v] = 1;
    b.per_target.emplace(n.id, std::move(picked));
  }
  for (NodeId v = 0; v < graph.size(); ++v)
    if (in[v]) b.nodes.push_back(v);
  for (const auto& e : graph.topology.edges())
    if (in[e.u] && in[e.v]) b.edges.push_back(e);
  b.bytes = estimate_memory(subgraph_bundle(graph, b.nodes, b.edges.size()));
  return b;
}

Mss mss(const TagGraph& graph, NodeId background, std::uint32_t cap) {
  if (background >= graph.size()) throw ValidationError("unknown node " + std::to_string(background));
  if (graph.nodes[background].is_target()) throw ValidationError("mss: node " + std::to_string(background) + " is a target");
  if (cap < 1) throw ValidationError("mss: cap must be >= 1");
  std::vector<std::uint8_t> is_target(graph.size());
  for (const auto& n : graph.nodes) is_target[n.id] = n.is_target();
  NodeId src[] = {background};
  return {background, kernels::serial::mss_all(graph.topology, is_target, src, cap).front()};
}

std::vector<Mss> mss_all(const TagGraph& graph, std::uint32_t cap) {
  if (cap < 1) throw ValidationError("mss: cap must be >= 1");
  std::vector<std::uint8_t> is_target(graph.size());
  std::vector<NodeId> sources;
  for (const auto& n : graph.nodes) {
    is_target[n.id] = n.is_target();
    if (!n.is_target()) sources.push_back(n.id);
  }
  auto reach = kernels::parallel::mss_all(graph.topology, is_target, sources, cap);
  std::vector<Mss> out;
  out.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) out.push_back({sources[i], std::move(reach[i])});
  return out;
}

std::vector<SkeletonClass> skeleton_classes(const TagGraph& graph, SkeletonVariant variant, std::uint32_t cap) {
  std::map<std::vector<std::pair<NodeId, std::uint32_t>>, std::vector<NodeId>> by_mss;
  std::map<std::vector<NodeId>, std::vector<NodeId>> by_targets;
  for (auto& m : mss_all(graph, cap)) {
    if (m.reach.empty()) continue;
    if (variant == SkeletonVariant::Alpha) {
      by_mss[m.reach].push_back(m.background);
    } else {
      std::vector<NodeId> ts;
      for (auto& [t, d] : m.reach) ts.push_back(t);
      by_targets[ts].push_back(m.background);
    }
  }
  std::vector<SkeletonClass> out;
  if (variant == SkeletonVariant::Alpha) {
    for (auto& [key, members] : by_mss) {
      SkeletonClass c;
      c.members = members;
      for (auto& [t, d] : key) c.targets.push_back(t);
      out.push_back(std::move(c));
    }
  } else {
    for (auto& [key, members] : by_targets) {
      SkeletonClass c;
      c.members = members;
      c.targets = key;
      c.fold = variant == SkeletonVariant::Gamma && key.size() == 1;
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SkeletonClass& a, const SkeletonClass& b) { return a.members.front() < b.members.front(); });
  return out;
}

CompressedGraph skeleton_compress(const TagGraph& graph, SkeletonVariant variant, std::uint32_t cap,
                                  LlmClient& client, ResponseCache* cache, const AggregationOptions& opts) {
  auto classes = skeleton_classes(graph, variant, cap);
  std::vector<AggregationJob> jobs;
  jobs.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    std::vector<std::string> targets, backgrounds;
    for (NodeId t : classes[i].targets) targets.push_back(graph.nodes[t].text);
    for (NodeId b : classes[i].members) backgrounds.push_back(graph.nodes[b].text);
    auto type = type_for_counts(targets.size(), backgrounds.size());
    jobs.push_back(make_job(static_cast<std::uint32_t>(i), type, std::move(targets), std::move(backgrounds)));
  }
  auto summaries = aggregate_all(jobs, client, cache, opts);
  std::vector<CondenseGroup> groups;
  groups.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    CondenseGroup g;
    g.source_id = static_cast<std::uint32_t>(i);
    g.members = classes[i].members;
    g.summary = summaries[i].summary;
    if (classes[i].fold) g.fold_into = classes[i].targets.front();
    groups.push_back(std::move(g));
  }
  return condense(graph.topology, graph, groups);
}

const std::vector<std::string>& baseline_methods() {
  static const std::vector<std::string> methods = {"random",        "degree",        "number",         "rag",
                                                   "skeleton-alpha", "skeleton-beta", "skeleton-gamma", "hs2c"};
  return methods;
}

EvalReport run_baseline_eval(const TagGraph& graph, const std::string& method, const BaselineSettings& settings,
                             LlmClient& client, ResponseCache* aggregation_cache, ResponseCache* classification_cache,
                             std::vector<Prediction>* predictions) {
  if (settings.categories.empty()) throw ValidationError("baseline evaluation needs a category list");

  if (method == "random" || method == "degree" || method == "number" || method == "rag") {
    const auto strategy = sampling_strategy_from_string(method);
    auto bundle = build_sample_bundle(graph, strategy, settings.budget, settings.seed);
    std::vector<TargetContext> contexts;
    std::vector<std::vector<NodeId>> groups;
    for (const auto& [t, picked] : bundle.per_target) {
      TargetContext ctx;
      ctx.id = t;
      ctx.text = graph.nodes[t].text;
      for (NodeId v : picked) ctx.neighbor_texts.push_back(graph.nodes[v].text);
      contexts.push_back(std::move(ctx));
      std::vector<NodeId> group{t};
      group.insert(group.end(), picked.begin(), picked.end());
      groups.push_back(std::move(group));
    }
    auto preds = classify_contexts(contexts, graph, settings.categories, client, classification_cache, settings.infer);
    auto eval = evaluate(preds, graph);
    EvalCounts counts;
    counts.original_nodes = graph.size();
    counts.compressed_nodes = bundle.nodes.size();
    counts.original_edges = graph.topology.num_edges();
    counts.compressed_edges = bundle.edges.size();
    counts.targets = graph.num_targets();
    auto report = make_report(method, eval, counts, try_homophily(groups, graph), bundle.bytes, settings.reference_gci);
    if (predictions) *predictions = std::move(preds);
    return report;
  }

  if (auto variant = skeleton_variant(method)) {
    auto classes = skeleton_classes(graph, *variant, settings.mss_cap);
    std::vector<std::vector<NodeId>> groups;
    for (const auto& c : classes) groups.push_back(c.members);
    auto compressed =
        skeleton_compress(graph, *variant, settings.mss_cap, client, aggregation_cache, settings.aggregation);
    return report_for_compressed(method, compressed, graph, try_homophily(groups, graph), settings, client,
                                 classification_cache, predictions);
  }

  if (method == "hs2c") {
    PartitionOptions popts;
    popts.gse_enabled = settings.gse_enabled;
    popts.k_max = settings.k_max;
    popts.epsilon = settings.epsilon;
    popts.similarity.exact_threshold = settings.exact_threshold;
    popts.similarity.seed = stage_seed(settings.seed, Stage::Enhance);
    popts.tree.height = settings.tree_height;
    popts.tree.seed = stage_seed(settings.seed, Stage::Partition);
    auto part = enhance_and_partition(graph, popts);
    auto typed = type_communities(part.partition, graph);
    auto retained = retain_communities(typed);
    auto jobs = make_jobs(retained, graph);
    auto results = aggregate_all(jobs, client, aggregation_cache, settings.aggregation);
    std::map<std::uint32_t, std::string> summaries;
    for (const auto& r : results) summaries[r.community_id] = r.summary;
    auto compressed = reconstruct(part.enhanced, typed, summaries);
    return report_for_compressed(method, compressed, graph, try_homophily(member_lists(typed), graph), settings,
                                 client, classification_cache, predictions);
  }

  throw ValidationError("unknown baseline method '" + method + "'");
}

}  // namespace tagc
