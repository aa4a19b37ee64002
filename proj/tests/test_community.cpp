#include <doctest.h>

#include "support/fixtures.hpp"
#include "tagc/community.hpp"
#include "tagc/error.hpp"

using namespace tagc;

namespace {

TagGraph labeled(std::vector<std::pair<bool, std::optional<std::string>>> spec) {
  TagGraph g;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    Node n;
    n.id = static_cast<NodeId>(i);
    n.external_id = static_cast<std::int64_t>(i);
    n.text = "t" + std::to_string(i);
    n.role = spec[i].first ? Role::Target : Role::Background;
    n.label = spec[i].second;
    g.nodes.push_back(n);
  }
  g.topology = WeightedGraph(spec.size(), {});
  return g;
}

}  // namespace

TEST_CASE("type is a pure function of the composition") {
  CHECK(type_for_counts(1, 0) == CommunityType::PureTarget);
  CHECK(type_for_counts(5, 0) == CommunityType::PureTarget);
  CHECK(type_for_counts(1, 3) == CommunityType::SpecificTarget);
  CHECK(type_for_counts(4, 1) == CommunityType::CommonSharedTarget);
  CHECK(type_for_counts(2, 2) == CommunityType::MixedTarget);
  CHECK(type_for_counts(0, 7) == CommunityType::PureBackground);
  CHECK(type_for_counts(1, 1) == CommunityType::SpecificTarget);
  CHECK_THROWS_AS(type_for_counts(0, 0), ValidationError);

  for (auto t : {CommunityType::PureTarget, CommunityType::SpecificTarget, CommunityType::CommonSharedTarget,
                 CommunityType::MixedTarget, CommunityType::PureBackground})
    CHECK(community_type_from_string(to_string(t)) == t);
  CHECK_THROWS(community_type_from_string("nope"));
}

TEST_CASE("exhaustive type table over small compositions") {
  for (std::size_t t = 0; t <= 6; ++t)
    for (std::size_t b = 0; b <= 6; ++b) {
      if (t + b == 0) continue;
      CommunityType expected;
      if (t == 0) expected = CommunityType::PureBackground;
      else if (b == 0) expected = CommunityType::PureTarget;
      else if (t == 1) expected = CommunityType::SpecificTarget;
      else if (b == 1) expected = CommunityType::CommonSharedTarget;
      else expected = CommunityType::MixedTarget;
      CHECK(type_for_counts(t, b) == expected);
    }
}

TEST_CASE("typing a partition counts members by role") {
  auto g = labeled({{true, "a"}, {false, "a"}, {false, "b"}, {true, "b"}, {true, "b"}, {false, "b"}});
  std::vector<Community> parts{{0, {0, 1, 2}}, {1, {3, 4, 5}}};
  auto typed = type_communities(parts, g);
  REQUIRE(typed.size() == 2);
  CHECK(typed[0].type == CommunityType::SpecificTarget);
  CHECK(typed[0].target_count == 1);
  CHECK(typed[0].background_count == 2);
  CHECK(typed[1].type == CommunityType::CommonSharedTarget);
}

TEST_CASE("homophily majority and tie-breaking") {
  auto g = labeled({{true, "b"}, {false, "a"}, {false, std::nullopt}, {true, "a"}, {true, "b"}, {false, "c"}});
  auto h = community_homophily(std::vector<NodeId>{0, 1, 2}, g);
  CHECK(h.score == doctest::Approx(0.5));
  CHECK(h.majority_label == "a");
  CHECK(h.counted == 2);
  CHECK(h.unlabeled == 1);

  auto h2 = community_homophily(std::vector<NodeId>{0, 4, 5}, g);
  CHECK(h2.score == doctest::Approx(2.0 / 3.0));
  CHECK(h2.majority_label == "b");

  auto rep = partition_homophily({{0, 1, 2}, {0, 4, 5}}, g);
  CHECK(rep.mean == doctest::Approx((0.5 + 2.0 / 3.0) / 2));
  CHECK(rep.skipped_unlabeled == 1);
}

TEST_CASE("homophily errors") {
  auto g = labeled({{true, std::nullopt}, {false, "a"}});
  CHECK_THROWS_AS(community_homophily(std::vector<NodeId>{0, 1}, g), ValidationError);
  auto g2 = labeled({{false, std::nullopt}});
  CHECK_THROWS_AS(partition_homophily({{0}}, g2), ValidationError);
  CHECK_THROWS_AS(partition_homophily({}, g2), ValidationError);
}

TEST_CASE("singleton partition has homophily one") {
  auto g = labeled({{true, "a"}, {false, "b"}, {true, "c"}});
  auto rep = partition_homophily({{0}, {1}, {2}}, g);
  CHECK(rep.mean == doctest::Approx(1.0));
}
