#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tagc {

struct LlmEndpointConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model = "mock";
  // Name of the environment variable holding the API key; unset is allowed
  // for local servers that do not check it.
  std::string api_key_env = "TAGC_API_KEY";
  std::size_t max_tokens = 512;
  double temperature = 0.0;
  double timeout_seconds = 120.0;
  std::size_t max_inflight = 4;
  std::size_t retries = 3;
  // First retry delay; doubles per attempt.
  double backoff_seconds = 0.5;

  void validate() const;
};

enum class RequestKind { Summarize, Classify };

struct ChatRequest {
  RequestKind kind = RequestKind::Summarize;
  std::string system;
  std::string user;
  // Offline clients work from these rather than the rendered prompt:
  // texts to summarize, or the target/neighbor texts to classify.
  std::vector<std::string> corpus;
  std::vector<std::string> categories;
};

struct Completion {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  double latency_ms = 0.0;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Thread-safe. Throws TransportError once the retry budget is spent and
  // EmptyCompletion when the endpoint answers with blank text.
  virtual Completion complete(const ChatRequest& request) = 0;
  virtual std::string model() const = 0;
};

// First sentence of each text (up to the first period, at most 120 code
// points), joined by "; ", cut to `char_limit` code points.
std::string mock_aggregate(std::span<const std::string> texts, std::size_t char_limit);

// Picks the category mentioned most often (case-insensitive) across the
// corpus; ties go to the earlier category, no mention at all to the first.
std::string mock_classify(std::span<const std::string> corpus, std::span<const std::string> categories);

class MockLlm final : public LlmClient {
 public:
  explicit MockLlm(std::size_t summary_char_limit = 600) : char_limit_(summary_char_limit) {}
  Completion complete(const ChatRequest& request) override;
  std::string model() const override { return "mock"; }

 private:
  std::size_t char_limit_;
};

// OpenAI-style chat-completions endpoint over HTTP(S).
class HttpLlm final : public LlmClient {
 public:
  explicit HttpLlm(LlmEndpointConfig config);
  Completion complete(const ChatRequest& request) override;
  std::string model() const override { return config_.model; }

 private:
  LlmEndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
};

// Append-only JSONL store of completions keyed by (content hash, model).
// Each line is {"hash": ..., "<value field>": ..., "model": ...}. A torn
// final line from an interrupted run is ignored on load.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path path, std::string value_field = "summary");

  std::optional<std::string> get(const std::string& hash, const std::string& model) const;
  // No-op when the key is already present.
  void put(const std::string& hash, const std::string& model, const std::string& value);
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  static std::string key(const std::string& hash, const std::string& model) { return model + '\n' + hash; }

  std::filesystem::path path_;
  std::string field_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

// Runs fn(0..n-1) on up to `max_inflight` worker threads. The first
// exception stops further dispatch and is rethrown after all workers join.
void run_bounded(std::size_t n, std::size_t max_inflight, const std::function<void(std::size_t)>& fn);

}  // namespace tagc
