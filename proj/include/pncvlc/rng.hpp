#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pncvlc {

using Engine = std::mt19937_64;

inline constexpr std::string_view kGeneratorName =
    "mt19937_64; stream seed = splitmix64 fold of (master_seed, scheme, snr_index, trial_index)";

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Folds a list of labels into a 64-bit stream key. Distinct label tuples give
/// statistically independent keys, and the result depends only on the values,
/// never on the order in which streams are requested.
template <typename... Labels>
constexpr std::uint64_t derive_stream_key(std::uint64_t seed, Labels... labels) noexcept {
  std::uint64_t key = splitmix64(seed);
  ((key = splitmix64(key ^ splitmix64(static_cast<std::uint64_t>(labels) + 0x632BE59BD9B4E019ULL))),
   ...);
  return key;
}

template <typename... Labels>
Engine make_stream(std::uint64_t seed, Labels... labels) {
  return Engine{derive_stream_key(seed, labels...)};
}

}  // namespace pncvlc
