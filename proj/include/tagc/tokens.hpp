#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace tagc {

// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

// Cuts `s` to at most `max_chars` code points without splitting a sequence.
std::string utf8_truncate(std::string_view s, std::size_t max_chars);

// Token count heuristic. The default is ceil(code points / 4); an exact
// tokenizer can be installed process-wide with set_token_estimator().
using TokenEstimator = std::function<std::size_t(std::string_view)>;
std::size_t estimate_tokens(std::string_view text);
void set_token_estimator(TokenEstimator estimator);
std::size_t heuristic_tokens(std::string_view text);

std::string sha256_hex(std::string_view data);

// splitmix64 step; used to fan one seed out to independent streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Portable bounded draw in [0, bound) from a 64-bit generator; unlike
// std::uniform_int_distribution the sequence is identical on every libstdc++/libc++.
template <typename Gen>
std::uint64_t bounded(Gen& gen, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

}  // namespace tagc
