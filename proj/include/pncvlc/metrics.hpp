#pragma once

// BER, throughput, Shannon capacity and energy per bit for one sweep point,
// plus the store-and-forward and point-to-point baselines.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "pncvlc/errors.hpp"
#include "pncvlc/exchange.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/scenario.hpp"
#include "pncvlc/scheme.hpp"

namespace pncvlc {

inline double compute_ber(const BitPacket& sent, const BitPacket& recovered) {
  if (sent.size() != recovered.size()) {
    throw FramingError("compute_ber: packets of " + std::to_string(sent.size()) + " and " +
                       std::to_string(recovered.size()) + " bits");
  }
  if (sent.empty()) return 0.0;
  return static_cast<double>(hamming_distance(sent, recovered)) / static_cast<double>(sent.size());
}

struct Throughput {
  double bps_hz = 0.0;
  double mbps = 0.0;
};

/// Hop-weighted delivered bits per channel use:
///   bps_hz = delivered_hop_bits / (exchanges * slots_used * samples_per_slot).
/// Error-free, this is 2*eta per concurrent hop: 4*eta for PNC, 2*eta for
/// store-and-forward and point-to-point.
inline Throughput compute_throughput(std::uint64_t delivered_hop_bits, Scheme scheme,
                                     const FrameLayout& layout, std::uint64_t exchanges,
                                     double sampling_rate_hz) {
  if (exchanges == 0) return {};
  const double uses = static_cast<double>(exchanges) * slots_used(scheme) *
                      static_cast<double>(layout.samples_per_slot());
  const double bps_hz = static_cast<double>(delivered_hop_bits) / uses;
  return {bps_hz, bps_hz * sampling_rate_hz / 1e6};
}

/// Shannon bound per channel use: hop_transmissions links at log2(1 + SNR)
/// each, scaled by the data fraction of the slot and spread over slots_used.
inline double compute_capacity(double snr_db, double efficiency, int hop_transmissions,
                               int slots) {
  if (!std::isfinite(snr_db)) throw ConfigError("compute_capacity: snr_db must be finite");
  const double snr = std::pow(10.0, snr_db / 10.0);
  return efficiency * std::log2(1.0 + snr) * hop_transmissions / slots;
}

inline double compute_capacity(double snr_db, Scheme scheme, double efficiency) {
  return compute_capacity(snr_db, efficiency, hop_transmissions(scheme), slots_used(scheme));
}

/// Normalized transmit energy per delivered bit; infinite when nothing arrived.
inline double compute_energy_per_bit(double total_tx_energy, std::uint64_t delivered_bits) {
  if (delivered_bits == 0) return std::numeric_limits<double>::infinity();
  return total_tx_energy / static_cast<double>(delivered_bits);
}

struct MetricsReport {
  std::string scenario;
  Scheme scheme = Scheme::PNC;
  double snr_db = 0.0;
  double ber = 0.0;
  double throughput_bps_hz = 0.0;
  double throughput_mbps = 0.0;
  double capacity_bps_hz = 0.0;
  double energy_per_bit = 0.0;
  std::uint64_t n_bits = 0;
  std::uint64_t seed = 0;
  // diagnostics, not part of the CSV schema
  double relay_xor_ber = 0.0;
  std::uint64_t relay_bits = 0;
  TrialTally tally;

  [[nodiscard]] bool within_shannon_bound() const {
    return throughput_bps_hz <= capacity_bps_hz;
  }
};

inline MetricsReport make_report(const TrialTally& t, Scheme scheme, double snr_db,
                                 const ScenarioConfig& cfg) {
  const auto layout = cfg.layout();
  MetricsReport r;
  r.scenario = cfg.name;
  r.scheme = scheme;
  r.snr_db = snr_db;
  r.ber = t.bits ? static_cast<double>(t.bit_errors) / static_cast<double>(t.bits) : 0.0;
  const auto tp = compute_throughput(t.delivered_hop_bits, scheme, layout, t.exchanges,
                                     cfg.sampling_rate_hz);
  r.throughput_bps_hz = tp.bps_hz;
  r.throughput_mbps = tp.mbps;
  r.capacity_bps_hz = compute_capacity(snr_db, scheme, layout.efficiency());
  r.energy_per_bit = compute_energy_per_bit(static_cast<double>(t.tx_energy_units),
                                            t.delivered_info_bits);
  r.n_bits = t.bits;
  r.seed = cfg.master_seed;
  r.relay_bits = t.relay_bits;
  r.relay_xor_ber =
      t.relay_bits ? static_cast<double>(t.relay_bit_errors) / static_cast<double>(t.relay_bits) : 0.0;
  r.tally = t;
  return r;
}

/// Runs `exchanges` store-and-forward or point-to-point exchanges at one SNR.
inline MetricsReport run_baseline(Scheme scheme, const ScenarioConfig& cfg, double snr_db,
                                  std::uint64_t exchanges, Engine& rng) {
  if (scheme != Scheme::StoreForward && scheme != Scheme::Pt2Pt) {
    throw ConfigError("run_baseline: scheme must be StoreForward or Pt2Pt");
  }
  const auto noise = calibrate_noise(snr_db, cfg.ambient_dc);
  TrialTally total;
  for (std::uint64_t i = 0; i < exchanges; ++i) total += run_exchange(cfg, scheme, noise, rng);
  return make_report(total, scheme, snr_db, cfg);
}

}  // namespace pncvlc
