#pragma once

// One bidirectional packet exchange per scheme, end to end: source packets,
// modulation, channels, relay processing, delivery and error tallies.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pncvlc/integrity.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/pnc_link.hpp"
#include "pncvlc/scenario.hpp"
#include "pncvlc/scheme.hpp"
#include "pncvlc/vlc_channel.hpp"

namespace pncvlc {

/// Integer counters so that merging is exact, associative and commutative.
struct TrialTally {
  std::uint64_t exchanges = 0;
  std::uint64_t bit_errors = 0;          // end to end, both directions
  std::uint64_t bits = 0;
  std::uint64_t relay_bit_errors = 0;    // relay XOR packet vs U_A ^ U_B (PNC only)
  std::uint64_t relay_bits = 0;
  std::uint64_t delivered_packets = 0;   // CRC-verified end-to-end packets
  std::uint64_t delivered_info_bits = 0;
  std::uint64_t delivered_hop_bits = 0;  // delivered packet bits times hops traversed
  std::uint64_t tx_energy_units = 0;     // slots, unit energy each
  std::uint64_t erasures = 0;

  TrialTally& operator+=(const TrialTally& o) {
    exchanges += o.exchanges;
    bit_errors += o.bit_errors;
    bits += o.bits;
    relay_bit_errors += o.relay_bit_errors;
    relay_bits += o.relay_bits;
    delivered_packets += o.delivered_packets;
    delivered_info_bits += o.delivered_info_bits;
    delivered_hop_bits += o.delivered_hop_bits;
    tx_energy_units += o.tx_energy_units;
    erasures += o.erasures;
    return *this;
  }

  friend bool operator==(const TrialTally&, const TrialTally&) = default;
};

inline std::uint64_t hamming_distance(const BitPacket& a, const BitPacket& b) {
  if (a.size() != b.size()) throw FramingError("hamming distance of unequal-length packets");
  std::uint64_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

namespace detail {

inline void tally_delivery(TrialTally& t, Scheme scheme, const BitPacket& sent,
                           const BitPacket& recovered) {
  t.bit_errors += hamming_distance(sent, recovered);
  t.bits += sent.size();
  if (crc_ok(recovered)) {
    ++t.delivered_packets;
    t.delivered_info_bits += recovered.size();
    t.delivered_hop_bits += recovered.size() * static_cast<std::uint64_t>(hops_per_packet(scheme));
  }
}

inline CsiMode uplink_csi(const ScenarioConfig& cfg) {
  return cfg.genie_csi ? CsiMode::genie : CsiMode::pilot;
}

inline CsiMode downlink_csi(const ScenarioConfig& cfg) {
  return (cfg.downlink_estimation && !cfg.genie_csi) ? CsiMode::pilot : CsiMode::genie;
}

}  // namespace detail

/// What the relay saw in one uplink phase; exposed for diagnostics and tests.
struct RelayObservation {
  ChannelRealization uplink;   // true channel (before pre-compensation)
  ChannelEstimate estimate;    // channel used for XOR decisions
  RelayPacket packet;
};

/// Uplink phase: both nodes transmit at once; the relay optionally first
/// measures the channel on a pilot-only training round and has node B
/// pre-rotate, then decodes U_R from the superposed data frame.
inline RelayObservation pnc_uplink(const ScenarioConfig& cfg, bool aligned, const BitPacket& u_a,
                                   const BitPacket& u_b, const ChannelRealization& uplink,
                                   Engine& rng) {
  const auto layout = cfg.layout();
  const auto pilots = cfg.pilots();
  const auto grid_a = build_frame(qpsk_map(u_a, layout.map), NodeId::A, pilots);
  auto grid_b = build_frame(qpsk_map(u_b, layout.map), NodeId::B, pilots);

  ChannelRealization effective = uplink;
  if (aligned) {
    ChannelEstimate training;
    if (cfg.genie_csi) {
      training = ChannelEstimate::from_realization(uplink);
    } else {
      auto pilot_only = [&](const QpskSymbolGrid& g) {
        auto p = QpskSymbolGrid::zeros(g.map, kPilotSymbols, kPilotSymbols);
        std::copy_n(g.values.begin(), kPilotSymbols * g.fft_size(), p.values.begin());
        return ofdm_modulate(p, layout.cp_len);
      };
      const auto rx = superpose_mac_phase(pilot_only(grid_a), pilot_only(grid_b), uplink, rng);
      training = estimate_channels(ofdm_demodulate(rx), pilots, layout.cp_len);
    }
    const auto pre = compute_precompensation(training);
    grid_b = apply_precompensation(grid_b, pre);
    std::vector<cplx> hb(uplink.h_b.size());
    for (std::size_t k = 0; k < hb.size(); ++k) hb[k] = uplink.h_b[k] * pre.rotation[k];
    effective = ChannelRealization::from_coefficients(uplink.h_a, std::move(hb), uplink.noise);
  }

  const auto rx = superpose_mac_phase(ofdm_modulate(grid_a, layout.cp_len),
                                      ofdm_modulate(grid_b, layout.cp_len), uplink, rng);
  const auto obs = ofdm_demodulate(rx);
  auto est = cfg.genie_csi ? ChannelEstimate::from_realization(effective)
                           : estimate_channels(obs, pilots, layout.cp_len);
  auto packet = decode_relay_packet(obs, est, cfg.likelihood);
  return RelayObservation{uplink, std::move(est), std::move(packet)};
}

inline ChannelRealization draw_uplink(const ScenarioConfig& cfg, const NoiseModel& noise, Engine& rng) {
  auto ch = draw_channel(cfg.links.a_to_relay, cfg.links.b_to_relay, noise, cfg.dims(), rng);
  if (cfg.phase_offset_rad) ch = ch.with_phase_offset(*cfg.phase_offset_rad);
  return ch;
}

inline TrialTally run_pnc_exchange(const ScenarioConfig& cfg, bool aligned, const NoiseModel& noise,
                                   Engine& rng) {
  const Scheme scheme = aligned ? Scheme::PNC : Scheme::PNC_unaligned;
  const auto layout = cfg.layout();
  const auto pilots = cfg.pilots();
  const auto u_a = make_source_packet(layout.packet_bits(), rng);
  const auto u_b = make_source_packet(layout.packet_bits(), rng);
  const auto uplink = draw_uplink(cfg, noise, rng);
  const auto down = draw_channel(cfg.links.relay_to_a, cfg.links.relay_to_b, noise, cfg.dims(), rng);

  const auto relay = pnc_uplink(cfg, aligned, u_a, u_b, uplink, rng);
  const auto csi = detail::downlink_csi(cfg);
  const auto b_at_a = broadcast_and_recover(relay.packet, down.h_a, noise.sigma2, u_a, layout, pilots, rng, csi);
  const auto a_at_b = broadcast_and_recover(relay.packet, down.h_b, noise.sigma2, u_b, layout, pilots, rng, csi);

  TrialTally t;
  t.exchanges = 1;
  t.relay_bit_errors = hamming_distance(relay.packet.bits, u_a ^ u_b);
  t.relay_bits = u_a.size();
  t.erasures = relay.packet.erasures;
  t.tx_energy_units = slots_used(scheme);
  detail::tally_delivery(t, scheme, u_b, b_at_a);
  detail::tally_delivery(t, scheme, u_a, a_at_b);
  return t;
}

/// Relay decodes each packet in its own slot and forwards it: four slots.
inline TrialTally run_store_forward_exchange(const ScenarioConfig& cfg, const NoiseModel& noise,
                                             Engine& rng) {
  const auto layout = cfg.layout();
  const auto pilots = cfg.pilots();
  const auto u_a = make_source_packet(layout.packet_bits(), rng);
  const auto u_b = make_source_packet(layout.packet_bits(), rng);
  const auto up = draw_channel(cfg.links.a_to_relay, cfg.links.b_to_relay, noise, cfg.dims(), rng);
  const auto down = draw_channel(cfg.links.relay_to_a, cfg.links.relay_to_b, noise, cfg.dims(), rng);
  const auto up_csi = detail::uplink_csi(cfg);
  const auto down_csi = detail::downlink_csi(cfg);
  const double s2 = noise.sigma2;

  const auto a_at_r = transmit_point_to_point(u_a, layout, pilots, up.h_a, s2, up_csi, rng);
  const auto a_at_b = transmit_point_to_point(a_at_r, layout, pilots, down.h_b, s2, down_csi, rng);
  const auto b_at_r = transmit_point_to_point(u_b, layout, pilots, up.h_b, s2, up_csi, rng);
  const auto b_at_a = transmit_point_to_point(b_at_r, layout, pilots, down.h_a, s2, down_csi, rng);

  TrialTally t;
  t.exchanges = 1;
  t.tx_energy_units = slots_used(Scheme::StoreForward);
  detail::tally_delivery(t, Scheme::StoreForward, u_b, b_at_a);
  detail::tally_delivery(t, Scheme::StoreForward, u_a, a_at_b);
  return t;
}

/// Direct A<->B links without a relay; the end-node geometries describe them.
inline TrialTally run_pt2pt_exchange(const ScenarioConfig& cfg, const NoiseModel& noise, Engine& rng) {
  const auto layout = cfg.layout();
  const auto pilots = cfg.pilots();
  const auto u_a = make_source_packet(layout.packet_bits(), rng);
  const auto u_b = make_source_packet(layout.packet_bits(), rng);
  const auto direct = draw_channel(cfg.links.a_to_relay, cfg.links.b_to_relay, noise, cfg.dims(), rng);
  const auto csi = detail::uplink_csi(cfg);

  const auto a_at_b = transmit_point_to_point(u_a, layout, pilots, direct.h_a, noise.sigma2, csi, rng);
  const auto b_at_a = transmit_point_to_point(u_b, layout, pilots, direct.h_b, noise.sigma2, csi, rng);

  TrialTally t;
  t.exchanges = 1;
  t.tx_energy_units = slots_used(Scheme::Pt2Pt);
  detail::tally_delivery(t, Scheme::Pt2Pt, u_b, b_at_a);
  detail::tally_delivery(t, Scheme::Pt2Pt, u_a, a_at_b);
  return t;
}

inline TrialTally run_exchange(const ScenarioConfig& cfg, Scheme scheme, const NoiseModel& noise,
                               Engine& rng) {
  switch (scheme) {
    case Scheme::PNC: return run_pnc_exchange(cfg, true, noise, rng);
    case Scheme::PNC_unaligned: return run_pnc_exchange(cfg, false, noise, rng);
    case Scheme::StoreForward: return run_store_forward_exchange(cfg, noise, rng);
    case Scheme::Pt2Pt: return run_pt2pt_exchange(cfg, noise, rng);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace pncvlc
