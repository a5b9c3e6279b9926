#pragma once

// CRC-32 trailer used to decide whether a recovered packet counts as delivered.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/crc.hpp>

#include "pncvlc/errors.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/rng.hpp"

namespace pncvlc {

inline constexpr std::size_t kCrcBits = 32;

/// CRC-32 (IEEE 802.3) over bits packed MSB-first, last byte zero-padded.
inline std::uint32_t crc32_of_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bytes[i / 8] |= static_cast<std::uint8_t>(bits[i] << (7 - i % 8));
  }
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

/// Random payload of length - 32 bits followed by its CRC-32.
inline BitPacket make_source_packet(std::size_t length, Engine& rng) {
  if (length <= kCrcBits) throw ConfigError("packet must be longer than its 32-bit CRC");
  auto payload = BitPacket::random(length - kCrcBits, rng);
  std::vector<std::uint8_t> bits(payload.bits().begin(), payload.bits().end());
  const auto crc = crc32_of_bits(payload.bits());
  for (int i = 31; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((crc >> i) & 1U));
  return BitPacket(std::move(bits));
}

inline bool crc_ok(const BitPacket& packet) {
  if (packet.size() <= kCrcBits) return false;
  const auto bits = packet.bits();
  const auto payload = bits.first(bits.size() - kCrcBits);
  std::uint32_t trailer = 0;
  for (std::size_t i = payload.size(); i < bits.size(); ++i) trailer = (trailer << 1) | bits[i];
  return crc32_of_bits(payload) == trailer;
}

}  // namespace pncvlc
