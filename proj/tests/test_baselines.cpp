#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "tagc/baselines.hpp"
#include "tagc/error.hpp"
#include "tagc/tokens.hpp"

using namespace tagc;

namespace {

TagGraph with_targets(const WeightedGraph& topo, std::initializer_list<NodeId> targets, std::size_t dim = 0) {
  auto tag = fixtures::random_tag(topo, 0.0, 11, dim);
  for (NodeId t : targets) tag.nodes[t].role = Role::Target;
  return tag;
}

std::set<NodeId> neighbor_set(const TagGraph& g, NodeId v) {
  std::set<NodeId> s;
  for (const auto& nb : g.topology.neighbors(v)) s.insert(nb.node);
  return s;
}

// MSS straight from all-pairs distances.
kernels::MssEntries mss_oracle(const TagGraph& g, const std::vector<std::vector<int>>& dist, NodeId b, int cap) {
  kernels::MssEntries out;
  for (const auto& n : g.nodes)
    if (n.is_target() && dist[b][n.id] >= 1 && dist[b][n.id] <= cap)
      out.emplace_back(n.id, static_cast<std::uint32_t>(dist[b][n.id]));
  return out;
}

BaselineSettings mock_settings(const TagGraph& g) {
  BaselineSettings s;
  s.categories = categories_from_labels(g);
  s.gse_enabled = false;
  return s;
}

}  // namespace

TEST_CASE("sampling order per strategy") {
  // Target 0 adjacent to 1, 2, 3 with degrees 1, 5, 3.
  auto topo = fixtures::make_graph(9, {{0, 1}, {0, 2}, {0, 3}, {2, 4}, {2, 5}, {2, 6}, {2, 7}, {3, 8}, {3, 4}});
  auto tag = with_targets(topo, {0}, 4);
  CHECK(sample_neighbors(tag, 0, SamplingStrategy::Degree, 1000, 0) == std::vector<NodeId>{2, 3, 1});
  CHECK(sample_neighbors(tag, 0, SamplingStrategy::Degree, 0, 0).empty());

  tag.nodes[1].text = std::string(40, 'a');
  tag.nodes[2].text = std::string(4, 'b');
  tag.nodes[3].text = std::string(12, 'c');
  CHECK(sample_neighbors(tag, 0, SamplingStrategy::Number, 1000, 0) == std::vector<NodeId>{2, 3, 1});
  // Admission stops at the first neighbour that overflows.
  CHECK(sample_neighbors(tag, 0, SamplingStrategy::Number, 4, 0) == std::vector<NodeId>{2, 3});
  CHECK(sample_neighbors(tag, 0, SamplingStrategy::Number, 13, 0) == std::vector<NodeId>{2, 3});

  tag.nodes[0].feature = {1, 0, 0, 0};
  tag.nodes[1].feature = {0.9, 0.1, 0, 0};
  tag.nodes[2].feature = {0, 1, 0, 0};
  tag.nodes[3].feature = {0.5, 0.5, 0, 0};
  CHECK(sample_neighbors(tag, 0, SamplingStrategy::Rag, 1000, 0) == std::vector<NodeId>{1, 3, 2});
  tag.nodes[3].feature.clear();
  CHECK_THROWS_AS(sample_neighbors(tag, 0, SamplingStrategy::Rag, 1000, 0), MissingFeatures);

  auto a = sample_neighbors(tag, 0, SamplingStrategy::Random, 1000, 42);
  CHECK(a == sample_neighbors(tag, 0, SamplingStrategy::Random, 1000, 42));
  CHECK(std::set<NodeId>(a.begin(), a.end()) == neighbor_set(tag, 0));

  CHECK(sampling_strategy_from_string("rag") == SamplingStrategy::Rag);
  CHECK_THROWS_AS(sampling_strategy_from_string("pagerank"), ValidationError);
}

TEST_CASE("sampled prompts respect the budget") {
  std::mt19937_64 gen(17);
  for (int round = 0; round < 60; ++round) {
    auto topo = fixtures::random_graph(25, 0.3, gen());
    auto tag = fixtures::random_tag(topo, 0.4, gen(), 3);
    for (auto& n : tag.nodes) n.text = std::string(gen() % 200, 'w');
    const std::size_t budget = gen() % 150;
    for (auto strategy : {SamplingStrategy::Random, SamplingStrategy::Degree, SamplingStrategy::Number,
                          SamplingStrategy::Rag}) {
      auto bundle = build_sample_bundle(tag, strategy, budget, gen());
      for (const auto& [t, picked] : bundle.per_target) {
        std::size_t used = 0;
        auto nbrs = neighbor_set(tag, t);
        for (NodeId v : picked) {
          used += estimate_tokens(tag.nodes[v].text);
          CHECK(nbrs.count(v) == 1);
        }
        CHECK(used <= budget);
      }
      for (const auto& e : bundle.edges) {
        CHECK(std::binary_search(bundle.nodes.begin(), bundle.nodes.end(), e.u));
        CHECK(std::binary_search(bundle.nodes.begin(), bundle.nodes.end(), e.v));
      }
    }
  }
}

TEST_CASE("multiple structure sets") {
  // t1 - b - t2
  auto path = fixtures::make_graph(3, {{0, 1}, {1, 2}});
  auto tag = with_targets(path, {0, 2});
  auto m = mss(tag, 1, 2);
  CHECK(m.reach == kernels::MssEntries{{0, 1}, {2, 1}});
  CHECK_THROWS_AS(mss(tag, 0, 2), ValidationError);
  CHECK_THROWS_AS(mss(tag, 1, 0), ValidationError);

  // b two hops from the lone target.
  auto two = fixtures::make_graph(3, {{0, 1}, {1, 2}});
  auto lone = with_targets(two, {0});
  CHECK(mss(lone, 2, 1).reach.empty());
  CHECK(mss(lone, 2, 2).reach == kernels::MssEntries{{0, 2}});

  std::mt19937_64 gen(5);
  for (int round = 0; round < 40; ++round) {
    auto topo = fixtures::random_graph(12, 0.2, gen());
    auto g = fixtures::random_tag(topo, 0.3, gen());
    auto dist = fixtures::floyd_warshall(topo);
    for (std::uint32_t cap : {1u, 2u, 3u, 12u}) {
      auto all = mss_all(g, cap);
      for (const auto& entry : all) {
        CHECK(entry.reach == mss_oracle(g, dist, entry.background, static_cast<int>(cap)));
        CHECK(entry.reach == mss(g, entry.background, cap).reach);
      }
    }
  }
}

TEST_CASE("skeleton classes on small fixtures") {
  // Two backgrounds hanging off the same target only.
  auto fan = fixtures::make_graph(3, {{0, 1}, {0, 2}});
  auto tag = with_targets(fan, {0});
  auto alpha = skeleton_classes(tag, SkeletonVariant::Alpha, 2);
  REQUIRE(alpha.size() == 1);
  CHECK(alpha[0].members == std::vector<NodeId>{1, 2});

  // Backgrounds at distance 1 and 2 from the same target.
  auto chain = fixtures::make_graph(3, {{0, 1}, {1, 2}});
  auto ctag = with_targets(chain, {0});
  CHECK(skeleton_classes(ctag, SkeletonVariant::Alpha, 2).size() == 2);
  auto beta = skeleton_classes(ctag, SkeletonVariant::Beta, 2);
  REQUIRE(beta.size() == 1);
  CHECK(beta[0].members == std::vector<NodeId>{1, 2});
  auto gamma = skeleton_classes(ctag, SkeletonVariant::Gamma, 2);
  REQUIRE(gamma.size() == 1);
  CHECK(gamma[0].fold);
}

TEST_CASE("alpha classes equal grouping by exact reach sets") {
  std::mt19937_64 gen(23);
  for (int round = 0; round < 40; ++round) {
    auto topo = fixtures::random_graph(12, 0.2, gen());
    auto g = fixtures::random_tag(topo, 0.3, gen());
    auto dist = fixtures::floyd_warshall(topo);
    std::map<kernels::MssEntries, std::vector<NodeId>> groups;
    for (const auto& n : g.nodes) {
      if (n.is_target()) continue;
      auto key = mss_oracle(g, dist, n.id, 2);
      if (!key.empty()) groups[key].push_back(n.id);
    }
    std::vector<std::vector<NodeId>> expected;
    for (auto& [k, v] : groups) expected.push_back(v);
    std::sort(expected.begin(), expected.end());
    std::vector<std::vector<NodeId>> got;
    for (const auto& c : skeleton_classes(g, SkeletonVariant::Alpha, 2)) got.push_back(c.members);
    CHECK(got == expected);
  }
}

TEST_CASE("alpha refines beta and node counts shrink") {
  std::mt19937_64 gen(31);
  MockLlm mock;
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 5 + gen() % 40;
    auto topo = fixtures::random_graph(n, 0.12, gen());
    auto g = fixtures::random_tag(topo, 0.25, gen());
    auto alpha = skeleton_classes(g, SkeletonVariant::Alpha, 2);
    auto beta = skeleton_classes(g, SkeletonVariant::Beta, 2);
    std::map<NodeId, std::size_t> beta_of;
    for (std::size_t i = 0; i < beta.size(); ++i)
      for (NodeId v : beta[i].members) beta_of[v] = i;
    for (const auto& a : alpha) {
      std::set<std::size_t> owners;
      for (NodeId v : a.members) owners.insert(beta_of.at(v));
      CHECK(owners.size() == 1);
    }
    auto va = skeleton_compress(g, SkeletonVariant::Alpha, 2, mock, nullptr, {}).num_nodes();
    auto vb = skeleton_compress(g, SkeletonVariant::Beta, 2, mock, nullptr, {}).num_nodes();
    auto vg = skeleton_compress(g, SkeletonVariant::Gamma, 2, mock, nullptr, {}).num_nodes();
    CHECK(vg <= vb);
    CHECK(vb <= va);
    CHECK(va <= n);
  }
}

TEST_CASE("every method reports through one schema") {
  auto topo = fixtures::random_graph(24, 0.2, 3);
  auto g = fixtures::random_tag(topo, 0.4, 3, 4);
  MockLlm mock;
  auto settings = mock_settings(g);
  settings.gse_enabled = true;
  settings.k_max = 3;
  std::vector<std::string> keys;
  for (const auto& method : baseline_methods()) {
    std::vector<Prediction> preds;
    auto report = run_baseline_eval(g, method, settings, mock, nullptr, nullptr, &preds);
    CHECK(report.method == method);
    CHECK(preds.size() == g.num_targets());
    CHECK_NOTHROW(check_report_identities(report));
    CHECK(report.counts.original_nodes == g.size());
    std::vector<std::string> k;
    const auto j = report.metrics_json();
    for (const auto& [key, v] : j.items()) k.push_back(key);
    if (keys.empty()) keys = k;
    CHECK(k == keys);
  }
  CHECK_THROWS_AS(run_baseline_eval(g, "pagerank", settings, mock, nullptr, nullptr), ValidationError);
  CHECK(run_baseline_eval(g, "skeleton-β", settings, mock, nullptr, nullptr).method == "skeleton-β");
}

TEST_CASE("a pure-background cluster makes the compressed graph smaller than sampling") {
  // Clique {0..5} with target 0; clique {6..11} of backgrounds hanging off node 5.
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId a = 0; a < 6; ++a)
    for (NodeId b = a + 1; b < 6; ++b) {
      pairs.emplace_back(a, b);
      pairs.emplace_back(a + 6, b + 6);
    }
  pairs.emplace_back(5, 6);
  auto topo = fixtures::make_graph(12, pairs);
  auto g = with_targets(topo, {0});
  MockLlm mock;
  auto settings = mock_settings(g);
  auto hs2c = run_baseline_eval(g, "hs2c", settings, mock, nullptr, nullptr);
  auto random = run_baseline_eval(g, "random", settings, mock, nullptr, nullptr);
  CHECK(hs2c.counts.compressed_nodes == 2);
  CHECK(random.counts.compressed_nodes == 6);
  CHECK(hs2c.gcr < random.gcr);
}
