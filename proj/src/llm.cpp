#include "tagc/llm.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tagc/error.hpp"
#include "tagc/tokens.hpp"

namespace tagc {

using nlohmann::json;

void LlmEndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("llm.base_url must not be empty");
  if (model.empty()) throw ConfigError("llm.model must not be empty");
  if (max_inflight < 1) throw ConfigError("llm.max_inflight must be >= 1");
  if (max_tokens < 1) throw ConfigError("llm.max_tokens must be >= 1");
  if (temperature < 0.0) throw ConfigError("llm.temperature must be >= 0");
  if (timeout_seconds <= 0.0) throw ConfigError("llm.timeout_seconds must be > 0");
  if (backoff_seconds < 0.0) throw ConfigError("llm.backoff_seconds must be >= 0");
}

namespace {

std::string first_sentence(const std::string& text) {
  constexpr std::size_t kMaxChars = 120;
  auto period = text.find('.');
  std::string s = period == std::string::npos ? text : text.substr(0, period);
  s = utf8_truncate(s, kMaxChars);
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

}  // namespace

std::string mock_aggregate(std::span<const std::string> texts, std::size_t char_limit) {
  if (texts.empty()) throw ValidationError("mock_aggregate: no texts");
  if (char_limit == 0) throw ValidationError("mock_aggregate: char_limit must be > 0");
  std::string out;
  for (const auto& t : texts) {
    auto s = first_sentence(t);
    if (s.empty()) continue;
    if (!out.empty()) out += "; ";
    out += s;
  }
  if (out.empty()) throw ValidationError("mock_aggregate: every text is empty");
  return utf8_truncate(out, char_limit);
}

std::string mock_classify(std::span<const std::string> corpus, std::span<const std::string> categories) {
  if (categories.empty()) throw ValidationError("mock_classify: no categories");
  std::string hay;
  for (const auto& t : corpus) {
    hay += lower(t);
    hay += '\n';
  }
  std::size_t best = 0, best_count = 0;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto c = count_occurrences(hay, lower(categories[i]));
    if (c > best_count) {
      best = i;
      best_count = c;
    }
  }
  return categories[best];
}

Completion MockLlm::complete(const ChatRequest& request) {
  Completion c;
  c.text = request.kind == RequestKind::Summarize ? mock_aggregate(request.corpus, char_limit_)
                                                  : mock_classify(request.corpus, request.categories);
  c.prompt_tokens = estimate_tokens(request.system) + estimate_tokens(request.user);
  c.completion_tokens = estimate_tokens(c.text);
  return c;
}

HttpLlm::HttpLlm(LlmEndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto& url = config_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("llm.base_url needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

Completion HttpLlm::complete(const ChatRequest& request) {
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  json body = {{"model", config_.model},
               {"messages", messages},
               {"temperature", config_.temperature},
               {"max_tokens", config_.max_tokens}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  for (std::size_t attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      auto delay = config_.backoff_seconds * static_cast<double>(1u << std::min<std::size_t>(attempt - 1, 10));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client client(scheme_host_port_);
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, payload, "application/json");
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
      continue;
    }
    Completion c;
    c.latency_ms = elapsed;
    try {
      const auto& content = reply.at("choices").at(0).at("message").at("content");
      if (content.is_string()) c.text = content.get<std::string>();
      if (reply.contains("usage")) {
        c.prompt_tokens = reply["usage"].value("prompt_tokens", std::size_t{0});
        c.completion_tokens = reply["usage"].value("completion_tokens", std::size_t{0});
      }
    } catch (const json::exception& e) {
      last_error = std::string("unexpected response shape: ") + e.what();
      continue;
    }
    if (c.text.find_first_not_of(" \t\r\n") == std::string::npos) throw EmptyCompletion();
    if (c.prompt_tokens == 0) c.prompt_tokens = estimate_tokens(request.system) + estimate_tokens(request.user);
    if (c.completion_tokens == 0) c.completion_tokens = estimate_tokens(c.text);
    return c;
  }
  throw TransportError("LLM endpoint " + config_.base_url + " unreachable after " +
                       std::to_string(config_.retries + 1) + " attempts: " + last_error);
}

ResponseCache::ResponseCache(std::filesystem::path path, std::string value_field)
    : path_(std::move(path)), field_(std::move(value_field)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  std::uintmax_t offset = 0, last_start = 0;
  std::vector<std::pair<std::size_t, std::string>> bad;
  while (std::getline(in, line)) {
    ++lineno;
    last_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    try {
      auto obj = json::parse(line);
      entries_.emplace(key(obj.at("hash").get<std::string>(), obj.at("model").get<std::string>()),
                       obj.at(field_).get<std::string>());
    } catch (const json::exception& e) {
      bad.emplace_back(lineno, e.what());
    }
  }
  in.close();
  if (bad.empty()) return;
  // Only the last line may be torn; cut it off so appends start clean.
  if (bad.size() > 1 || bad.front().first != lineno)
    throw ParseError(path_.string(), bad.front().first, bad.front().second);
  std::filesystem::resize_file(path_, last_start);
}

std::optional<std::string> ResponseCache::get(const std::string& hash, const std::string& model) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key(hash, model));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& hash, const std::string& model, const std::string& value) {
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(key(hash, model), value).second) return;
  nlohmann::ordered_json obj;
  obj["hash"] = hash;
  obj[field_] = value;
  obj["model"] = model;
  if (!path_.parent_path().empty()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << obj.dump() << '\n';
  out.flush();
  if (!out) throw Error("failed to append to cache " + path_.string());
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void run_bounded(std::size_t n, std::size_t max_inflight, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers = std::clamp<std::size_t>(max_inflight, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        auto i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tagc
