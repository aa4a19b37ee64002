#include "tagc/tokens.hpp"

#include <array>
#include <mutex>

#include <openssl/sha.h>

namespace tagc {

namespace {

std::mutex& estimator_mutex() {
  static std::mutex m;
  return m;
}

TokenEstimator& estimator() {
  static TokenEstimator e = heuristic_tokens;
  return e;
}

}  // namespace

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::string utf8_truncate(std::string_view s, std::size_t max_chars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (chars == max_chars) return std::string(s.substr(0, i));
      ++chars;
    }
  }
  return std::string(s);
}

std::size_t heuristic_tokens(std::string_view text) { return (utf8_length(text) + 3) / 4; }

std::size_t estimate_tokens(std::string_view text) {
  std::lock_guard lock(estimator_mutex());
  return estimator()(text);
}

void set_token_estimator(TokenEstimator e) {
  std::lock_guard lock(estimator_mutex());
  estimator() = e ? std::move(e) : TokenEstimator(heuristic_tokens);
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest.data());
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (unsigned char b : digest) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xF]);
  }
  return out;
}

}  // namespace tagc
