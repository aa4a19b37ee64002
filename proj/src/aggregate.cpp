#include "tagc/aggregate.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "tagc/error.hpp"
#include "tagc/tokens.hpp"

namespace tagc {

namespace {

constexpr const char* kSpecificIntro =
    "Given a single target paper and a group of background papers from the same community within a citation "
    "graph. Each paper is represented by its title and abstract. The background papers, which are connected to "
    "the target paper and may share a common semantic focus or research topic with the target paper.";
constexpr const char* kSpecificTask =
    "Summarize the content of those background papers that are semantically aligned with the target paper, "
    "focus on shared research disciplines, domains, directions, or topics. Please write the summary in a "
    "cohesive and formal academic style.";

constexpr const char* kCommonSharedIntro =
    "Given a group of target papers and a single background paper from the same community within a citation "
    "graph. Each paper is represented by its title and abstract. The background paper, which is connected to "
    "the target papers and may share a common semantic focus or research topic with the target papers.";
constexpr const char* kCommonSharedTask =
    "Summarize the content of the background paper that is semantically aligned with the target papers, focus "
    "on shared research disciplines, domains, directions, or topics. Please write the summary in a cohesive and "
    "formal academic style.";

constexpr const char* kMixedIntro =
    "Given a group of target papers and a group of background papers from the same community within a citation "
    "graph. Each paper is represented by its title and abstract. The background papers, which are connected to "
    "the target papers and may share a common semantic focus or research topic with the target paper.";
constexpr const char* kMixedTask =
    "Summarize the content of those background papers that are semantically aligned with the target papers, "
    "focus on shared research disciplines, domains, directions, or topics. Please write the summary in a "
    "cohesive and formal academic style.";

std::string numbered(std::span<const std::string> texts) {
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i) out += '\n';
    out += "[" + std::to_string(i + 1) + "] " + texts[i];
  }
  return out;
}

std::string layout(const char* intro, const char* target_header, const std::string& targets,
                   const char* background_header, const std::string& backgrounds, const char* task) {
  std::string out = intro;
  out += "\n\n";
  out += target_header;
  out += '\n';
  out += targets;
  out += "\n\n";
  out += background_header;
  out += '\n';
  out += backgrounds;
  out += "\n\nTask:\n";
  out += task;
  out += "\n\nAnswer:";
  return out;
}

void append_length_prefixed(std::string& out, const std::string& s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
}

std::size_t prompt_tokens(CommunityType type, std::span<const std::string> targets,
                          std::span<const std::string> backgrounds) {
  return estimate_tokens(render_aggregation_prompt(type, targets, backgrounds));
}

// A prompt that fits the budget plus the backgrounds left over for a
// follow-up request.
struct Fitted {
  CommunityType type;
  std::vector<std::string> targets;
  std::vector<std::string> included;
  std::vector<std::string> overflow;
};

std::string shrink_to_fit(const std::function<std::size_t(const std::string&)>& cost, const std::string& text,
                          std::size_t budget) {
  std::size_t lo = 0, hi = utf8_length(text);
  while (lo < hi) {
    std::size_t mid = (lo + hi + 1) / 2;
    if (cost(utf8_truncate(text, mid)) <= budget) lo = mid;
    else hi = mid - 1;
  }
  return utf8_truncate(text, lo);
}

Fitted fit_budget(const std::vector<std::string>& targets, const std::vector<std::string>& backgrounds,
                  std::size_t budget) {
  Fitted f;
  f.targets = targets;

  // Long targets are trimmed so that at least half the budget is left for
  // the background corpus.
  const std::vector<std::string> probe{""};
  auto target_cost = [&](const std::vector<std::string>& ts) {
    return prompt_tokens(type_for_counts(ts.size(), 1), ts, probe);
  };
  if (target_cost(f.targets) > budget / 2) {
    std::size_t cap = 0;
    for (const auto& t : f.targets) cap = std::max(cap, utf8_length(t));
    while (cap > 0) {
      cap = cap * 3 / 4;
      std::vector<std::string> cut;
      for (const auto& t : targets) cut.push_back(utf8_truncate(t, cap));
      f.targets = std::move(cut);
      if (target_cost(f.targets) <= budget / 2) break;
    }
    if (target_cost(f.targets) > budget / 2)
      throw ValidationError("llm.context_budget too small for the aggregation template");
  }

  // Longest backgrounds first; stop at the first one that no longer fits.
  std::vector<std::size_t> order(backgrounds.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> len(backgrounds.size());
  for (std::size_t i = 0; i < backgrounds.size(); ++i) len[i] = estimate_tokens(backgrounds[i]);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return len[a] > len[b]; });

  std::size_t pos = 0;
  for (; pos < order.size(); ++pos) {
    f.included.push_back(backgrounds[order[pos]]);
    if (prompt_tokens(type_for_counts(f.targets.size(), f.included.size()), f.targets, f.included) > budget) {
      f.included.pop_back();
      break;
    }
  }
  if (f.included.empty()) {
    const auto& first = backgrounds[order[0]];
    auto single_cost = [&](const std::string& text) {
      std::vector<std::string> one{text};
      return prompt_tokens(type_for_counts(f.targets.size(), 1), f.targets, one);
    };
    f.included.push_back(shrink_to_fit(single_cost, first, budget));
    pos = 1;
  }
  for (; pos < order.size(); ++pos) f.overflow.push_back(backgrounds[order[pos]]);
  f.type = type_for_counts(f.targets.size(), f.included.size());
  return f;
}

AggregationResult request_summary(const AggregationJob& job, LlmClient& client, const AggregationOptions& opts) {
  AggregationResult r;
  r.community_id = job.community_id;
  r.hash = job.hash;
  std::vector<std::string> remaining = job.background_texts;
  while (!remaining.empty()) {
    auto fitted = fit_budget(job.target_texts, remaining, opts.context_budget);
    ChatRequest req;
    req.kind = RequestKind::Summarize;
    req.user = render_aggregation_prompt(fitted.type, fitted.targets, fitted.included);
    req.corpus = fitted.included;
    auto c = client.complete(req);
    if (!r.summary.empty()) r.summary += ' ';
    r.summary += c.text;
    r.prompt_tokens += c.prompt_tokens;
    r.completion_tokens += c.completion_tokens;
    r.latency_ms += c.latency_ms;
    ++r.requests;
    remaining = std::move(fitted.overflow);
  }
  return r;
}

}  // namespace

std::string aggregation_hash(CommunityType type, std::vector<std::string> target_texts,
                             std::vector<std::string> background_texts) {
  std::sort(target_texts.begin(), target_texts.end());
  std::sort(background_texts.begin(), background_texts.end());
  std::string buf = to_string(type);
  buf += "|t";
  for (const auto& t : target_texts) append_length_prefixed(buf, t);
  buf += "|b";
  for (const auto& b : background_texts) append_length_prefixed(buf, b);
  return sha256_hex(buf);
}

AggregationJob make_job(std::uint32_t community_id, CommunityType type, std::vector<std::string> target_texts,
                        std::vector<std::string> background_texts) {
  if (background_texts.empty()) throw ValidationError("aggregation job needs at least one background text");
  AggregationJob job;
  job.community_id = community_id;
  job.type = type;
  std::sort(target_texts.begin(), target_texts.end());
  std::sort(background_texts.begin(), background_texts.end());
  job.target_texts = std::move(target_texts);
  job.background_texts = std::move(background_texts);
  job.hash = aggregation_hash(job.type, job.target_texts, job.background_texts);
  return job;
}

std::vector<AggregationJob> make_jobs(std::span<const TypedCommunity> communities, const TagGraph& graph) {
  std::vector<AggregationJob> jobs;
  for (const auto& c : communities) {
    if (c.background_count == 0 || c.target_count == 0) continue;
    std::vector<std::string> targets, backgrounds;
    for (NodeId v : c.members) {
      const auto& n = graph.nodes.at(v);
      (n.is_target() ? targets : backgrounds).push_back(n.text);
    }
    jobs.push_back(make_job(c.id, c.type, std::move(targets), std::move(backgrounds)));
  }
  return jobs;
}

std::string render_aggregation_prompt(CommunityType type, std::span<const std::string> target_texts,
                                      std::span<const std::string> background_texts) {
  const auto nt = target_texts.size(), nb = background_texts.size();
  switch (type) {
    case CommunityType::SpecificTarget:
      if (nt != 1 || nb < 1)
        throw ValidationError("specific template needs exactly one target and at least one background text");
      return layout(kSpecificIntro, "Target paper:", target_texts[0], "Background papers:", numbered(background_texts),
                    kSpecificTask);
    case CommunityType::CommonSharedTarget:
      if (nt < 1 || nb != 1)
        throw ValidationError("common-shared template needs target texts and exactly one background text");
      return layout(kCommonSharedIntro, "Target papers:", numbered(target_texts), "Background paper:",
                    background_texts[0], kCommonSharedTask);
    case CommunityType::MixedTarget:
      if (nt < 1 || nb < 1) throw ValidationError("mixed template needs target and background texts");
      return layout(kMixedIntro, "Target papers:", numbered(target_texts), "Background papers:",
                    numbered(background_texts), kMixedTask);
    case CommunityType::PureTarget:
    case CommunityType::PureBackground:
      break;
  }
  throw ValidationError(std::string("no aggregation template for ") + to_string(type) + " communities");
}

AggregationResult aggregate(const AggregationJob& job, LlmClient& client, ResponseCache* cache,
                            const AggregationOptions& opts) {
  if (job.background_texts.empty()) throw ValidationError("aggregation job without background texts");
  if (cache) {
    if (auto hit = cache->get(job.hash, client.model())) {
      AggregationResult r;
      r.community_id = job.community_id;
      r.hash = job.hash;
      r.summary = *hit;
      r.cached = true;
      return r;
    }
  }
  AggregationResult r;
  try {
    r = request_summary(job, client, opts);
  } catch (const TransportError&) {
    if (!opts.fallback_to_mock) throw;
    r = {};
  } catch (const EmptyCompletion&) {
    if (!opts.fallback_to_mock) throw;
    r = {};
  }
  if (r.summary.empty()) {
    // Fallback summaries are never cached so a later live run retries them.
    MockLlm mock(opts.mock_char_limit);
    r = request_summary(job, mock, opts);
    r.fell_back = true;
    return r;
  }
  if (cache) cache->put(job.hash, client.model(), r.summary);
  return r;
}

std::vector<AggregationResult> aggregate_all(std::span<const AggregationJob> jobs, LlmClient& client,
                                             ResponseCache* cache, const AggregationOptions& opts) {
  std::vector<AggregationResult> out(jobs.size());
  run_bounded(jobs.size(), opts.max_inflight, [&](std::size_t i) { out[i] = aggregate(jobs[i], client, cache, opts); });
  return out;
}

}  // namespace tagc
