#pragma once

// Relay-side processing of a two-way PNC exchange: pilot-based channel
// estimation, phase-aligning pre-compensation for node B, maximum-likelihood
// XOR mapping of the superposed symbols, and the broadcast/recovery phase.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pncvlc/errors.hpp"
#include "pncvlc/fft.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/vlc_channel.hpp"

namespace pncvlc {

// ---------------------------------------------------------------------------
// Channel estimation
// ---------------------------------------------------------------------------

struct ChannelEstimate {
  std::vector<cplx> h_a_hat;
  std::vector<cplx> h_b_hat;
  std::vector<double> phase_offsets_hat;
  double sigma2_hat = 0.0;
  bool genie = false;

  /// True coefficients and noise variance, for isolating decision errors.
  static ChannelEstimate from_realization(const ChannelRealization& ch) {
    return ChannelEstimate{ch.h_a, ch.h_b, relative_phase(ch.h_a, ch.h_b), ch.noise.sigma2, true};
  }
};

/// Least-squares estimate from the two leading pilot symbols of a received
/// grid. Noise variance comes from the energy the pilots cannot explain: null
/// subcarriers of both pilot symbols when the map has any, otherwise the
/// delay-domain taps of h_a beyond channel_memory (the channel has no energy
/// there after the cyclic prefix constraint).
inline ChannelEstimate estimate_channels(const QpskSymbolGrid& received,
                                         const PilotSequences& pilots,
                                         std::size_t channel_memory) {
  if (received.n_pilots != kPilotSymbols || received.n_symbols < kPilotSymbols) {
    throw FramingError("received grid does not carry the two-slot pilot layout");
  }
  const auto idx = received.map.data();
  if (pilots.a.size() != idx.size() || pilots.b.size() != idx.size()) {
    throw FramingError("pilot length does not match data subcarrier count");
  }
  const std::size_t k_size = received.fft_size();
  ChannelEstimate est;
  est.h_a_hat.assign(k_size, cplx{});
  est.h_b_hat.assign(k_size, cplx{});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (pilots.a[i] == cplx{} || pilots.b[i] == cplx{}) {
      throw ConfigError("pilot reference value is zero on subcarrier " + std::to_string(idx[i]));
    }
    est.h_a_hat[idx[i]] = received.at(idx[i], 0) / pilots.a[i];
    est.h_b_hat[idx[i]] = received.at(idx[i], 1) / pilots.b[i];
  }
  est.phase_offsets_hat = relative_phase(est.h_a_hat, est.h_b_hat);

  if (received.map.has_nulls()) {
    double energy = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < kPilotSymbols; ++n) {
      for (std::size_t k = 0; k < k_size; ++k) {
        if (received.map.is_data(k)) continue;
        energy += std::norm(received.at(k, n));
        ++count;
      }
    }
    est.sigma2_hat = energy / static_cast<double>(count);
  } else if (channel_memory + 1 < k_size) {
    const auto taps = unitary_ifft(est.h_a_hat);
    double energy = 0.0;
    for (std::size_t t = channel_memory + 1; t < k_size; ++t) energy += std::norm(taps[t]);
    // unit-magnitude pilots leave the per-tap noise variance at sigma^2
    est.sigma2_hat = energy / static_cast<double>(k_size - channel_memory - 1);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Phase alignment
// ---------------------------------------------------------------------------

struct Precompensation {
  std::vector<cplx> rotation;      // c[k], applied by node B before its IFFT
  std::vector<bool> unalignable;   // data subcarriers with a zero h_a estimate
};

/// c[k] = exp(-j phi_hat_k) so that arg(h_b[k] c[k] / h_a[k]) ~ 0.
inline Precompensation compute_precompensation(const ChannelEstimate& est) {
  const std::size_t k_size = est.h_a_hat.size();
  Precompensation pre{std::vector<cplx>(k_size, cplx{1.0, 0.0}), std::vector<bool>(k_size, false)};
  for (std::size_t k = 0; k < k_size; ++k) {
    if (est.h_a_hat[k] == cplx{}) {
      pre.unalignable[k] = true;
      continue;
    }
    pre.rotation[k] = std::polar(1.0, -est.phase_offsets_hat[k]);
  }
  return pre;
}

/// Rotates every column of a grid (pilots included) by the per-subcarrier c[k].
inline QpskSymbolGrid apply_precompensation(const QpskSymbolGrid& grid, const Precompensation& pre) {
  if (pre.rotation.size() != grid.fft_size()) {
    throw FramingError("pre-compensation length does not match fft_size");
  }
  QpskSymbolGrid out = grid;
  for (std::size_t n = 0; n < out.n_symbols; ++n) {
    auto col = out.column(n);
    for (std::size_t k = 0; k < col.size(); ++k) col[k] *= pre.rotation[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// ML XOR mapping
// ---------------------------------------------------------------------------

enum class Likelihood { exact, max_log };

/// Two-bit value (b0 << 1) | b1.
using BitPair = std::uint8_t;

/// Per-hypothesis log-likelihoods (up to a common constant) of the XOR pair:
///   log sum_{a ^ b == r} exp(-|y - h_a s(a) - h_b s(b)|^2 / sigma2)
/// or the max over the same set for max-log.
inline std::array<double, 4> xor_log_likelihoods(cplx y, cplx h_a, cplx h_b, double sigma2,
                                                 Likelihood variant = Likelihood::exact) {
  std::array<std::array<double, 4>, 4> metric{};  // [xor][member]
  std::array<std::size_t, 4> fill{};
  for (unsigned a = 0; a < 4; ++a) {
    for (unsigned b = 0; b < 4; ++b) {
      const unsigned r = a ^ b;
      metric[r][fill[r]++] = -std::norm(y - h_a * qpsk_point(a) - h_b * qpsk_point(b)) / sigma2;
    }
  }
  std::array<double, 4> ll{};
  for (unsigned r = 0; r < 4; ++r) {
    const double peak = *std::max_element(metric[r].begin(), metric[r].end());
    if (variant == Likelihood::max_log) {
      ll[r] = peak;
      continue;
    }
    double sum = 0.0;
    for (double m : metric[r]) sum += std::exp(m - peak);
    ll[r] = peak + std::log(sum);
  }
  return ll;
}

namespace detail {
/// argmax with ties resolved toward the smallest pair value.
inline BitPair argmax_pair(const std::array<double, 4>& score) {
  BitPair best = 0;
  for (BitPair r = 1; r < 4; ++r) {
    if (score[r] > score[best]) best = r;
  }
  return best;
}
}  // namespace detail

/// argmax_r Pr(y | x_R = r). Both channels must be nonzero and sigma2 positive.
inline BitPair xor_map_ml(cplx y, cplx h_a, cplx h_b, double sigma2,
                          Likelihood variant = Likelihood::exact) {
  if (!(sigma2 > 0.0)) throw PreconditionError("xor_map_ml needs sigma2 > 0");
  if (h_a == cplx{} || h_b == cplx{}) {
    throw PreconditionError("xor_map_ml: XOR is not identifiable with a zero channel");
  }
  return detail::argmax_pair(xor_log_likelihoods(y, h_a, h_b, sigma2, variant));
}

/// Vanishing-noise limit: XOR of the closest superposed pair.
inline BitPair xor_map_min_distance(cplx y, cplx h_a, cplx h_b) {
  if (h_a == cplx{} || h_b == cplx{}) {
    throw PreconditionError("xor_map_min_distance: XOR is not identifiable with a zero channel");
  }
  return detail::argmax_pair(xor_log_likelihoods(y, h_a, h_b, 1.0, Likelihood::max_log));
}

struct XorDecision {
  std::vector<BitPair> xor_symbols;  // K_data x N, data subcarriers first
  std::size_t erasures = 0;
};

struct RelayPacket {
  BitPacket bits;
  std::size_t erasures = 0;
};

inline XorDecision decide_xor_symbols(const QpskSymbolGrid& obs, const ChannelEstimate& est,
                                      Likelihood variant = Likelihood::exact) {
  if (est.h_a_hat.size() != obs.fft_size() || est.h_b_hat.size() != obs.fft_size()) {
    throw FramingError("channel estimate does not match the observation grid");
  }
  const bool noiseless = !(est.sigma2_hat > 0.0);
  XorDecision out;
  out.xor_symbols.reserve(obs.map.n_data() * obs.n_data_symbols());
  for (std::size_t n = obs.n_pilots; n < obs.n_symbols; ++n) {
    for (auto k : obs.map.data()) {
      const cplx ha = est.h_a_hat[k];
      const cplx hb = est.h_b_hat[k];
      if (ha == cplx{} || hb == cplx{}) {
        ++out.erasures;
        out.xor_symbols.push_back(0);
        continue;
      }
      const cplx y = obs.at(k, n);
      out.xor_symbols.push_back(noiseless ? xor_map_min_distance(y, ha, hb)
                                          : xor_map_ml(y, ha, hb, est.sigma2_hat, variant));
    }
  }
  return out;
}

/// U_R: decided XOR pairs unpacked in the order qpsk_map consumed the bits.
inline RelayPacket decode_relay_packet(const QpskSymbolGrid& obs, const ChannelEstimate& est,
                                       Likelihood variant = Likelihood::exact) {
  const auto decision = decide_xor_symbols(obs, est, variant);
  std::vector<std::uint8_t> bits;
  bits.reserve(2 * decision.xor_symbols.size());
  for (auto r : decision.xor_symbols) {
    bits.push_back((r >> 1) & 1U);
    bits.push_back(r & 1U);
  }
  return RelayPacket{BitPacket(std::move(bits)), decision.erasures};
}

// ---------------------------------------------------------------------------
// Single-link transmission and broadcast
// ---------------------------------------------------------------------------

/// How a single-link receiver obtains its channel.
enum class CsiMode { genie, pilot };

/// Modulates bits into a frame whose pilot slot 0 carries the sender's
/// training sequence, passes it through h, and returns the receiver's
/// hard-decided bits after one-tap equalization.
inline BitPacket transmit_point_to_point(const BitPacket& bits, const FrameLayout& layout,
                                         const PilotSequences& pilots, const std::vector<cplx>& h,
                                         double sigma2, CsiMode csi, Engine& rng) {
  const auto frame = ofdm_modulate(build_frame(qpsk_map(bits, layout.map), NodeId::A, pilots),
                                   layout.cp_len);
  auto grid = ofdm_demodulate(apply_p2p_channel(frame, h, sigma2, rng));
  const std::vector<cplx>* eq = &h;
  ChannelEstimate est;
  if (csi == CsiMode::pilot) {
    est = estimate_channels(grid, pilots, layout.cp_len);
    eq = &est.h_a_hat;
  }
  for (std::size_t n = grid.n_pilots; n < grid.n_symbols; ++n) {
    for (auto k : grid.map.data()) {
      const cplx g = (*eq)[k];
      grid.at(k, n) = g == cplx{} ? cplx{} : grid.at(k, n) / g;
    }
  }
  return qpsk_demap(grid);
}

/// Relay broadcast of U_R over one downlink, then partner recovery at the end
/// node: U_R_hat xor own packet.
inline BitPacket broadcast_and_recover(const RelayPacket& relay_pkt, const std::vector<cplx>& ch_down,
                                       double sigma2, const BitPacket& own_pkt,
                                       const FrameLayout& layout, const PilotSequences& pilots,
                                       Engine& rng, CsiMode csi = CsiMode::genie) {
  if (own_pkt.size() != relay_pkt.bits.size()) {
    throw FramingError("own packet has " + std::to_string(own_pkt.size()) +
                       " bits, relay packet has " + std::to_string(relay_pkt.bits.size()));
  }
  const auto heard = transmit_point_to_point(relay_pkt.bits, layout, pilots, ch_down, sigma2, csi, rng);
  return heard ^ own_pkt;
}

}  // namespace pncvlc
