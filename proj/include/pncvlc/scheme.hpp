#pragma once

#include <array>
#include <string>
#include <string_view>

#include "pncvlc/errors.hpp"

namespace pncvlc {

/// Exchange schemes compared in a sweep. PNC uses phase alignment;
/// PNC_unaligned skips it.
enum class Scheme { PNC, PNC_unaligned, StoreForward, Pt2Pt };

inline constexpr std::array<Scheme, 4> kAllSchemes = {Scheme::PNC, Scheme::PNC_unaligned,
                                                      Scheme::StoreForward, Scheme::Pt2Pt};

constexpr std::string_view scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::PNC: return "PNC";
    case Scheme::PNC_unaligned: return "PNC_unaligned";
    case Scheme::StoreForward: return "StoreForward";
    case Scheme::Pt2Pt: return "Pt2Pt";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (auto s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

/// Time slots per bidirectional exchange of one packet each way.
constexpr int slots_used(Scheme s) noexcept {
  switch (s) {
    case Scheme::PNC:
    case Scheme::PNC_unaligned: return 2;  // MAC + broadcast
    case Scheme::StoreForward: return 4;   // A->R, R->B, B->R, R->A
    case Scheme::Pt2Pt: return 2;          // A->B, B->A
  }
  return 0;
}

/// Hops traversed by each end-to-end packet.
constexpr int hops_per_packet(Scheme s) noexcept { return s == Scheme::Pt2Pt ? 1 : 2; }

/// Link deliveries per exchange: two packets, each over its hops.
constexpr int hop_transmissions(Scheme s) noexcept { return 2 * hops_per_packet(s); }

}  // namespace pncvlc
