#include <doctest.h>

#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "tagc/enhance.hpp"
#include "tagc/error.hpp"

using namespace tagc;

namespace {

TagGraph featured(const WeightedGraph& topo, std::size_t d, std::uint64_t seed) {
  return fixtures::random_tag(topo, 0.3, seed, d);
}

}  // namespace

TEST_CASE("pearson reference values and errors") {
  std::vector<double> a{1, 2, 3, 4}, b{1, 2, 3, 5}, c{4, 3, 2, 1}, flat{2, 2, 2, 2};
  CHECK(pearson(a, b) == doctest::Approx(0.9827076298239906).epsilon(1e-12));
  CHECK(pearson(a, a) == doctest::Approx(1.0));
  CHECK(pearson(a, c) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(pearson(a, flat), NoVariance);
  CHECK_THROWS_AS(pearson(a, std::vector<double>{1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}), ValidationError);
}

TEST_CASE("pearson is symmetric, bounded and invariant to affine maps") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(16), y(16), z(16);
    for (int i = 0; i < 16; ++i) {
      x[i] = normal(gen);
      y[i] = normal(gen);
      z[i] = 3.5 * x[i] - 2.0;
    }
    double r = pearson(x, y);
    CHECK(r == doctest::Approx(pearson(y, x)));
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(pearson(x, z) == doctest::Approx(1.0));
  }
}

TEST_CASE("one-dimensional entropy of a path") {
  CHECK(one_dim_se(fixtures::make_graph(3, {{0, 1}, {1, 2}})) == doctest::Approx(1.5));
  CHECK(one_dim_se(fixtures::barbell()) == doctest::Approx(2.556656707462823));
  CHECK_THROWS_AS(one_dim_se(WeightedGraph(3, {})), ValidationError);
}

TEST_CASE("knn candidate edges are the symmetrized top-k union") {
  auto tag = featured(fixtures::random_graph(40, 0.05, 2), 6, 9);
  auto top = similarity_topk(tag, 3);
  std::set<std::pair<NodeId, NodeId>> expected;
  for (NodeId i = 0; i < top.size(); ++i)
    for (auto& s : top[i]) expected.insert({std::min(i, s.id), std::max(i, s.id)});
  auto edges = knn_candidate_edges(tag, 3);
  REQUIRE(edges.size() == expected.size());
  auto it = expected.begin();
  for (auto& e : edges) {
    CHECK(e.u == it->first);
    CHECK(e.v == it->second);
    CHECK(e.w == 1);
    CHECK(e.origin == EdgeOrigin::Knn);
    ++it;
  }
}

TEST_CASE("enhancement keeps original edges and adds only new pairs") {
  auto topo = fixtures::random_graph(50, 0.08, 4);
  auto tag = featured(topo, 5, 4);
  auto eg = enhance(tag, 4);
  for (const auto& e : topo.edges()) {
    CHECK(eg.graph.weight(e.u, e.v) == e.w);
  }
  std::size_t knn_only = 0;
  for (const auto& e : eg.graph.edges()) {
    if (e.origin == EdgeOrigin::Knn) {
      ++knn_only;
      CHECK(topo.weight(e.u, e.v) == 0);
      CHECK(e.w == 1);
    }
  }
  CHECK(knn_only == eg.augmented_edges());
  CHECK(eg.graph.num_edges() == topo.num_edges() + knn_only);
}

TEST_CASE("select_k matches a direct sweep of H1") {
  auto topo = fixtures::random_graph(60, 0.04, 8);
  auto tag = featured(topo, 8, 8);
  const std::size_t k_max = 8;
  const double eps = 1e-2;
  auto sel = select_k(tag, k_max, eps);
  REQUIRE(sel.entropy.size() == k_max);
  std::vector<double> h;
  for (std::size_t k = 1; k <= k_max; ++k) h.push_back(one_dim_se(enhance(tag, k).graph));
  for (std::size_t k = 0; k < k_max; ++k) CHECK(sel.entropy[k] == doctest::Approx(h[k]).epsilon(1e-12));
  std::size_t expected = k_max;
  for (std::size_t k = 1; k < k_max; ++k)
    if ((h[k] - h[k - 1]) / h[k - 1] < eps) {
      expected = k;
      break;
    }
  CHECK(sel.k_m == expected);
  CHECK_THROWS_AS(select_k(tag, k_max, 0.0), ValidationError);
}

TEST_CASE("missing features are rejected") {
  auto tag = fixtures::random_tag(fixtures::triangle(), 0.5, 1, 0);
  CHECK_THROWS_AS(similarity_topk(tag, 1), MissingFeatures);
  auto ok = featured(fixtures::triangle(), 3, 1);
  CHECK_THROWS_AS(similarity_topk(ok, 3), ValidationError);
  CHECK_THROWS_AS(similarity_topk(ok, 0), ValidationError);
}
