#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "support/fixtures.hpp"
#include "tagc/aggregate.hpp"
#include "tagc/error.hpp"
#include "tagc/tokens.hpp"

using namespace tagc;
namespace fs = std::filesystem;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

// Counts calls and answers with a fixed text.
class ScriptedLlm final : public LlmClient {
 public:
  explicit ScriptedLlm(std::string reply) : reply_(std::move(reply)) {}
  Completion complete(const ChatRequest& req) override {
    ++calls;
    last_prompt = req.user;
    return {reply_ + std::to_string(calls.load()), 10, 3, 1.0};
  }
  std::string model() const override { return "scripted"; }
  std::atomic<int> calls{0};
  std::string last_prompt;

 private:
  std::string reply_;
};

class FailingLlm final : public LlmClient {
 public:
  explicit FailingLlm(bool empty) : empty_(empty) {}
  Completion complete(const ChatRequest&) override {
    if (empty_) throw EmptyCompletion();
    throw TransportError("connection refused");
  }
  std::string model() const override { return "down"; }

 private:
  bool empty_;
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tagc_agg_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("mock aggregation contract") {
  std::vector<std::string> texts{"Alpha beta. More.", "Gamma delta."};
  CHECK(mock_aggregate(texts, 100) == "Alpha beta; Gamma delta");
  CHECK(mock_aggregate(texts, 5) == "Alpha");
  CHECK_THROWS(mock_aggregate(std::vector<std::string>{""}, 100));
  CHECK_THROWS(mock_aggregate(std::vector<std::string>{}, 100));

  std::string longer(300, 'x');
  CHECK(utf8_length(mock_aggregate(std::vector<std::string>{longer}, 1000)) == 120);
  CHECK(mock_aggregate(texts, 100) == mock_aggregate(texts, 100));
}

TEST_CASE("specific template") {
  std::vector<std::string> t{"target text"};
  std::vector<std::string> b{"first background", "second background"};
  auto p = render_aggregation_prompt(CommunityType::SpecificTarget, t, b);
  CHECK(count_of(p, "Target paper:") == 1);
  CHECK(count_of(p, "Background papers:") == 1);
  CHECK(p.find("[1] first background") != std::string::npos);
  CHECK(p.find("[2] second background") != std::string::npos);
  CHECK(p.find("Summarize the content of those background papers that are semantically aligned with the target "
               "paper") != std::string::npos);
  CHECK(p.substr(p.size() - 7) == "Answer:");

  std::vector<std::string> two_targets{"a", "b"};
  CHECK_THROWS_AS(render_aggregation_prompt(CommunityType::SpecificTarget, two_targets, b), ValidationError);
}

TEST_CASE("common-shared template takes exactly one background") {
  std::vector<std::string> t{"t one", "t two"};
  std::vector<std::string> one{"only background"};
  auto p = render_aggregation_prompt(CommunityType::CommonSharedTarget, t, one);
  CHECK(p.find("Background paper:\nonly background") != std::string::npos);
  CHECK(p.find("Target papers:\n[1] t one\n[2] t two") != std::string::npos);

  std::vector<std::string> two{"b1", "b2"};
  CHECK_THROWS_AS(render_aggregation_prompt(CommunityType::CommonSharedTarget, t, two), ValidationError);
}

TEST_CASE("mixed template and pure types") {
  std::vector<std::string> t{"t1", "t2"};
  std::vector<std::string> b{"b1", "b2"};
  auto p = render_aggregation_prompt(CommunityType::MixedTarget, t, b);
  CHECK(p.find("Target papers:") != std::string::npos);
  CHECK(p.find("Background papers:") != std::string::npos);
  CHECK_THROWS_AS(render_aggregation_prompt(CommunityType::PureTarget, t, b), ValidationError);
  CHECK_THROWS_AS(render_aggregation_prompt(CommunityType::PureBackground, t, b), ValidationError);
  std::vector<std::string> none;
  CHECK_THROWS_AS(render_aggregation_prompt(CommunityType::MixedTarget, t, none), ValidationError);
}

TEST_CASE("job hash ignores member order") {
  std::vector<std::string> t{"x", "y"};
  std::vector<std::string> b{"p", "q", "r"};
  auto h = aggregation_hash(CommunityType::MixedTarget, t, b);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(t.begin(), t.end(), gen);
    std::shuffle(b.begin(), b.end(), gen);
    CHECK(aggregation_hash(CommunityType::MixedTarget, t, b) == h);
  }
  CHECK(aggregation_hash(CommunityType::SpecificTarget, {"x"}, b) != aggregation_hash(CommunityType::MixedTarget, {"x"}, b));
  // Length prefixes keep concatenation collisions apart.
  CHECK(aggregation_hash(CommunityType::MixedTarget, {"ab"}, {"c"}) !=
        aggregation_hash(CommunityType::MixedTarget, {"a"}, {"bc"}));
  CHECK_THROWS_AS(make_job(0, CommunityType::MixedTarget, t, {}), ValidationError);
}

TEST_CASE("one job per retained community with backgrounds") {
  auto topo = fixtures::make_graph(8, {});
  auto tag = fixtures::random_tag(topo, 0.0, 1);
  for (NodeId v : {0u, 3u, 4u, 6u}) tag.nodes[v].role = Role::Target;
  std::vector<Community> parts{{0, {0, 1}}, {1, {2}}, {2, {3, 4}}, {3, {5, 6, 7}}};
  auto typed = type_communities(parts, tag);
  auto jobs = make_jobs(typed, tag);
  REQUIRE(jobs.size() == 2);
  CHECK(jobs[0].community_id == 0);
  CHECK(jobs[0].type == CommunityType::SpecificTarget);
  CHECK(jobs[1].community_id == 3);
  CHECK(jobs[1].background_texts.size() == 2);
  CHECK(std::is_sorted(jobs[1].background_texts.begin(), jobs[1].background_texts.end()));
}

TEST_CASE("cache serves repeated jobs without requests") {
  TempDir dir;
  auto job = make_job(4, CommunityType::SpecificTarget, {"target"}, {"bg one.", "bg two."});
  ScriptedLlm llm("summary ");
  {
    ResponseCache cache(dir.path / "cache.jsonl");
    auto first = aggregate(job, llm, &cache);
    CHECK(first.summary == "summary 1");
    CHECK(first.requests == 1);
    CHECK(first.prompt_tokens == 10);
    CHECK_FALSE(first.cached);
    auto second = aggregate(job, llm, &cache);
    CHECK(second.cached);
    CHECK(second.summary == "summary 1");
    CHECK(llm.calls == 1);
  }
  // Survives a reload, and only one line was written.
  ResponseCache reloaded(dir.path / "cache.jsonl");
  CHECK(reloaded.size() == 1);
  CHECK(aggregate(job, llm, &reloaded).cached);
  CHECK(llm.calls == 1);
  // Another model does not share entries.
  MockLlm mock;
  CHECK_FALSE(aggregate(job, mock, &reloaded).cached);
}

TEST_CASE("cache tolerates a torn final line only") {
  TempDir dir;
  auto p = dir.path / "cache.jsonl";
  {
    std::ofstream out(p);
    out << R"({"hash":"h1","summary":"s1","model":"m"})" << "\n" << R"({"hash":"h2","summ)";
  }
  ResponseCache cache(p);
  CHECK(cache.size() == 1);
  CHECK(cache.get("h1", "m") == std::optional<std::string>("s1"));
  cache.put("h3", "m", "s3");
  cache.put("h3", "m", "other");
  CHECK(cache.get("h3", "m") == std::optional<std::string>("s3"));
  ResponseCache again(p);
  CHECK(again.size() == 2);

  {
    std::ofstream out(p);
    out << "garbage\n" << R"({"hash":"h1","summary":"s1","model":"m"})" << "\n";
  }
  CHECK_THROWS(ResponseCache(p));
}

TEST_CASE("transport failures abort or fall back") {
  auto job = make_job(1, CommunityType::SpecificTarget, {"t"}, {"Only sentence here. Tail."});
  FailingLlm down(false);
  CHECK_THROWS_AS(aggregate(job, down, nullptr), TransportError);
  FailingLlm empty(true);
  CHECK_THROWS_AS(aggregate(job, empty, nullptr), EmptyCompletion);

  TempDir dir;
  ResponseCache cache(dir.path / "c.jsonl");
  AggregationOptions opts;
  opts.fallback_to_mock = true;
  auto r = aggregate(job, down, &cache, opts);
  CHECK(r.fell_back);
  CHECK(r.summary == "Only sentence here");
  CHECK(cache.size() == 0);
}

TEST_CASE("oversized communities are summarized in several requests") {
  std::vector<std::string> backgrounds;
  for (int i = 0; i < 12; ++i) backgrounds.push_back("Background " + std::to_string(i) + ". " + std::string(400, 'a' + i));
  auto job = make_job(0, CommunityType::SpecificTarget, {"short target"}, backgrounds);

  ScriptedLlm llm("part ");
  AggregationOptions opts;
  opts.context_budget = 400;
  auto r = aggregate(job, llm, nullptr, opts);
  CHECK(r.requests > 1);
  CHECK(r.requests == static_cast<std::size_t>(llm.calls.load()));
  CHECK(r.summary.find("part 1 part 2") == 0);

  // Every request stays within the budget, and mock summaries cover every text.
  class BudgetCheck final : public LlmClient {
   public:
    explicit BudgetCheck(std::size_t b) : budget(b) {}
    Completion complete(const ChatRequest& req) override {
      CHECK(estimate_tokens(req.user) <= budget);
      seen += req.corpus.size();
      return {"ok", 0, 0, 0};
    }
    std::string model() const override { return "check"; }
    std::size_t budget;
    std::size_t seen = 0;
  } check(opts.context_budget);
  aggregate(job, check, nullptr, opts);
  CHECK(check.seen == backgrounds.size());
}

TEST_CASE("aggregate_all keeps job order under concurrency") {
  std::vector<AggregationJob> jobs;
  for (std::uint32_t i = 0; i < 17; ++i)
    jobs.push_back(make_job(i, CommunityType::SpecificTarget, {"t"}, {"Text number " + std::to_string(i) + ". x"}));
  MockLlm mock;
  AggregationOptions opts;
  opts.max_inflight = 3;
  auto out = aggregate_all(jobs, mock, nullptr, opts);
  REQUIRE(out.size() == jobs.size());
  for (std::uint32_t i = 0; i < 17; ++i) {
    CHECK(out[i].community_id == i);
    CHECK(out[i].summary == "Text number " + std::to_string(i));
  }
}

TEST_CASE("endpoint config validation") {
  LlmEndpointConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_inflight = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.base_url = "localhost:8000";
  CHECK_THROWS_AS(HttpLlm{c}, ConfigError);
}

TEST_CASE("chat-completions client against a local server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::atomic<int> flaky{0};
  std::string seen_body;
  std::string seen_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_body = req.body;
    seen_auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"content":"a summary"}}],"usage":{"prompt_tokens":42,"completion_tokens":7}})",
                    "application/json");
  });
  server.Post("/flaky/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (flaky++ < 2) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"choices":[{"message":{"content":"late"}}]})", "application/json");
  });
  server.Post("/empty/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"message":{"content":"  "}}]})", "application/json");
  });
  server.Post("/denied/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content("no", "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string root = "http://127.0.0.1:" + std::to_string(port);
  LlmEndpointConfig c;
  c.model = "m1";
  c.backoff_seconds = 0.001;
  c.timeout_seconds = 5;
  c.api_key_env = "TAGC_TEST_KEY_UNSET_XYZ";

  ChatRequest req;
  req.user = "hello";

  c.base_url = root + "/v1";
  HttpLlm ok(c);
  auto r = ok.complete(req);
  CHECK(r.text == "a summary");
  CHECK(r.prompt_tokens == 42);
  CHECK(r.completion_tokens == 7);
  auto body = nlohmann::json::parse(seen_body);
  CHECK(body["model"] == "m1");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["max_tokens"] == 512);
  CHECK(body["messages"][0]["content"] == "hello");
  CHECK(seen_auth.empty());

  c.base_url = root + "/flaky/";
  CHECK(HttpLlm(c).complete(req).text == "late");
  CHECK(flaky == 3);

  c.base_url = root + "/empty";
  CHECK_THROWS_AS(HttpLlm(c).complete(req), EmptyCompletion);

  c.base_url = root + "/denied";
  CHECK_THROWS_AS(HttpLlm(c).complete(req), TransportError);

  c.base_url = root + "/flaky";
  c.retries = 0;
  flaky = 0;
  CHECK_THROWS_AS(HttpLlm(c).complete(req), TransportError);

  server.stop();
  worker.join();

  c.base_url = root + "/v1";
  c.retries = 1;
  CHECK_THROWS_AS(HttpLlm(c).complete(req), TransportError);
}
