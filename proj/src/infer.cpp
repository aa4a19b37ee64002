#include "tagc/infer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "tagc/error.hpp"
#include "tagc/tokens.hpp"

namespace tagc {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string layout(std::string_view target, const std::string& neighbors, const std::string& categories) {
  std::string out = "Given a citation graph, the 0th node (target paper) has the following information: ";
  out += target;
  out += "\n\nThe target paper is connected to the following papers: ";
  out += neighbors;
  out +=
      "\n\nQuestion: Based on the features of the target paper and its citation network, please determine the "
      "most appropriate ArXiv CS sub-category for the target paper.\n\nCategories: ";
  out += categories;
  out +=
      ".\n\nPlease think about the categorization of the target paper in a structured manner, and only output the "
      "single most relevant category of the target paper. Do not give any reasoning or extra text for your "
      "answer.\n\nAnswer:";
  return out;
}

std::string neighbor_block(std::span<const std::string> texts) {
  if (texts.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) out += "\n[" + std::to_string(i + 1) + "] " + texts[i];
  return out;
}

}  // namespace

const char* to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::Matched: return "matched";
    case ParseStatus::NoMatch: return "no_match";
    case ParseStatus::AmbiguousMatch: return "ambiguous_match";
  }
  return "?";
}

std::vector<NodeId> ordered_neighbors(const WeightedGraph& adjacency, NodeId node) {
  if (node >= adjacency.num_nodes()) throw ValidationError("unknown node " + std::to_string(node));
  auto nbrs = adjacency.neighbors(node);
  std::vector<Neighbor> sorted(nbrs.begin(), nbrs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Neighbor& a, const Neighbor& b) { return a.w != b.w ? a.w > b.w : a.node < b.node; });
  std::vector<NodeId> out;
  out.reserve(sorted.size());
  for (const auto& n : sorted) out.push_back(n.node);
  return out;
}

std::vector<NodeId> neighbors_1hop(const CompressedGraph& compressed, NodeId target) {
  if (!std::binary_search(compressed.targets.begin(), compressed.targets.end(), target))
    throw ValidationError("unknown target " + std::to_string(target));
  return ordered_neighbors(compressed.adjacency(), target);
}

ClassificationPrompt render_classification_prompt(std::string_view target_text,
                                                  std::span<const std::string> neighbor_texts,
                                                  std::span<const std::string> categories, std::size_t token_budget) {
  if (categories.empty()) throw ValidationError("empty category list");
  const std::string cats = join(categories, ", ");
  ClassificationPrompt p;
  p.text = layout(target_text, neighbor_block({}), cats);
  p.tokens = estimate_tokens(p.text);
  if (p.tokens > token_budget)
    throw TargetTooLong("classification prompt needs " + std::to_string(p.tokens) + " tokens without neighbors, budget is " +
                        std::to_string(token_budget));
  std::size_t keep = 0;
  for (; keep < neighbor_texts.size(); ++keep) {
    auto candidate = layout(target_text, neighbor_block(neighbor_texts.first(keep + 1)), cats);
    auto tokens = estimate_tokens(candidate);
    if (tokens > token_budget) break;
    p.text = std::move(candidate);
    p.tokens = tokens;
  }
  p.neighbors_included = keep;
  p.neighbors_dropped = neighbor_texts.size() - keep;
  return p;
}

ParsedLabel parse_label(std::string_view answer, std::span<const std::string> categories) {
  const std::string a = lower(trim(answer));
  for (const auto& c : categories)
    if (lower(c) == a) return {ParseStatus::Matched, c};

  std::vector<const std::string*> hits;
  for (const auto& c : categories) {
    auto lc = lower(c);
    if (!lc.empty() && a.find(lc) != std::string::npos) hits.push_back(&c);
  }
  std::vector<const std::string*> maximal;
  for (auto* h : hits) {
    bool contained = false;
    for (auto* o : hits)
      if (o != h && o->size() > h->size() && lower(*o).find(lower(*h)) != std::string::npos) contained = true;
    if (!contained) maximal.push_back(h);
  }
  if (maximal.size() == 1) return {ParseStatus::Matched, *maximal.front()};
  if (maximal.empty()) return {ParseStatus::NoMatch, {}};
  return {ParseStatus::AmbiguousMatch, {}};
}

Evaluation evaluate(std::span<const Prediction> predictions, const TagGraph& graph) {
  std::map<NodeId, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;
  Evaluation ev;
  for (const auto& n : graph.nodes) {
    if (!n.is_target()) continue;
    if (!n.label) throw ValidationError("target " + std::to_string(n.external_id) + " has no gold label");
    ++ev.total;
    auto it = by_id.find(n.id);
    std::string pred = "(none)";
    if (it != by_id.end() && it->second->status == ParseStatus::Matched && it->second->pred) {
      pred = *it->second->pred;
      if (pred == *n.label) ++ev.correct;
    } else {
      ++ev.unparsed;
    }
    ++ev.confusion[*n.label][pred];
  }
  ev.acc = ev.total ? 100.0 * static_cast<double>(ev.correct) / static_cast<double>(ev.total) : 0.0;
  return ev;
}

std::string target_context(const CompressedGraph& compressed, const TagGraph& original, NodeId target) {
  std::string text = original.nodes.at(target).text;
  if (auto it = compressed.context_suffix.find(target); it != compressed.context_suffix.end())
    text += "\n" + it->second;
  return text;
}

std::vector<Prediction> classify_contexts(std::span<const TargetContext> contexts, const TagGraph& original,
                                          std::span<const std::string> categories, LlmClient& client,
                                          ResponseCache* cache, const InferOptions& opts) {
  if (categories.empty()) throw ValidationError("empty category list");
  std::vector<Prediction> out(contexts.size());
  run_bounded(contexts.size(), opts.max_inflight, [&](std::size_t i) {
    const auto& ctx = contexts[i];
    const auto& node = original.nodes.at(ctx.id);
    auto prompt = render_classification_prompt(ctx.text, ctx.neighbor_texts, categories, opts.context_budget);

    Prediction p;
    p.id = ctx.id;
    p.external_id = node.external_id;
    p.gold = node.label.value_or("");
    p.neighbors_included = prompt.neighbors_included;
    p.neighbors_dropped = prompt.neighbors_dropped;

    const std::string hash = sha256_hex(prompt.text);
    std::optional<std::string> answer;
    if (cache) answer = cache->get(hash, client.model());
    if (!answer) {
      ChatRequest req;
      req.kind = RequestKind::Classify;
      req.user = prompt.text;
      req.corpus.push_back(ctx.text);
      for (std::size_t k = 0; k < prompt.neighbors_included; ++k) req.corpus.push_back(ctx.neighbor_texts[k]);
      req.categories.assign(categories.begin(), categories.end());
      answer = client.complete(req).text;
      if (cache) cache->put(hash, client.model(), *answer);
    }
    p.raw_answer = *answer;
    auto parsed = parse_label(p.raw_answer, categories);
    p.status = parsed.status;
    if (parsed.status == ParseStatus::Matched) p.pred = parsed.label;
    out[i] = std::move(p);
  });
  return out;
}

std::vector<Prediction> classify_targets(const CompressedGraph& compressed, const TagGraph& original,
                                         std::span<const std::string> categories, LlmClient& client,
                                         ResponseCache* cache, const InferOptions& opts) {
  const auto adjacency = compressed.adjacency();
  std::vector<TargetContext> contexts;
  contexts.reserve(compressed.targets.size());
  for (NodeId t : compressed.targets) {
    TargetContext ctx;
    ctx.id = t;
    ctx.text = target_context(compressed, original, t);
    for (NodeId nb : ordered_neighbors(adjacency, t))
      ctx.neighbor_texts.push_back(compressed.is_condensed(nb) ? compressed.condensed_node(nb).summary
                                                               : target_context(compressed, original, nb));
    contexts.push_back(std::move(ctx));
  }
  return classify_contexts(contexts, original, categories, client, cache, opts);
}

std::vector<std::string> read_categories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open categories file " + path.string());
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = std::string(trim(line));
    if (t.empty()) continue;
    if (!seen.insert(lower(t)).second) throw ParseError(path.string(), lineno, "duplicate category '" + t + "'");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError("categories file " + path.string() + " is empty");
  return out;
}

std::vector<std::string> categories_from_labels(const TagGraph& graph) {
  std::set<std::string> labels;
  for (const auto& n : graph.nodes)
    if (n.label) labels.insert(*n.label);
  if (labels.empty()) throw ValidationError("graph carries no labels to derive categories from");
  return {labels.begin(), labels.end()};
}

}  // namespace tagc
