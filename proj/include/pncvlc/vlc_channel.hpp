#pragma once

// Optical link geometry, per-frame channel realizations and their application
// to OFDM frames, including the superposed uplink at the relay.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "pncvlc/errors.hpp"
#include "pncvlc/fft.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/rng.hpp"

namespace pncvlc {

enum class LinkScenario { LoS, NLoS };

struct GeometryConfig {
  double distance_m = 2.0;
  double led_semiangle_deg = 60.0;
  double pd_area_m2 = 1e-4;
  double irradiance_deg = 0.0;
  double incidence_deg = 0.0;
  double fov_deg = 70.0;
  LinkScenario scenario = LinkScenario::LoS;
  double rms_delay_spread_ns = 0.0;
  double occlusion_prob = 0.0;
  double occlusion_atten_db = 20.0;

  /// Throws ConfigError naming the offending field.
  void validate(const std::string& where = "geometry") const {
    auto fail = [&](const std::string& field, const std::string& why) {
      throw ConfigError(where + "." + field + ": " + why);
    };
    if (!(distance_m > 0.0)) fail("distance_m", "must be positive");
    if (!(led_semiangle_deg > 0.0 && led_semiangle_deg < 90.0)) {
      fail("led_semiangle_deg", "must lie in (0, 90)");
    }
    if (!(pd_area_m2 > 0.0)) fail("pd_area_m2", "must be positive");
    if (!(incidence_deg >= 0.0 && incidence_deg <= 180.0)) {
      fail("incidence_deg", "must lie in [0, 180]");
    }
    if (!(irradiance_deg >= 0.0 && irradiance_deg < 90.0)) {
      fail("irradiance_deg", "must lie in [0, 90)");
    }
    if (!(fov_deg > 0.0 && fov_deg <= 180.0)) fail("fov_deg", "must lie in (0, 180]");
    if (!(rms_delay_spread_ns >= 0.0)) fail("rms_delay_spread_ns", "must be non-negative");
    if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0)) {
      fail("occlusion_prob", "must lie in [0, 1]");
    }
    if (!(occlusion_atten_db >= 0.0)) fail("occlusion_atten_db", "must be non-negative");
  }

  friend bool operator==(const GeometryConfig&, const GeometryConfig&) = default;
};

/// Noise per frequency-domain sample. sigma2 == 0 is the noiseless limit used
/// by exactness tests; calibrate_noise always yields sigma2 > 0.
struct NoiseModel {
  double sigma2 = 1.0;
  double ambient_dc = 0.0;  // removed by AC coupling
  double snr_db = 0.0;
};

/// Maps a received per-subcarrier SNR (unit signal energy) to sigma^2.
inline NoiseModel calibrate_noise(double snr_db, double ambient_dc = 0.0) {
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
  return NoiseModel{std::pow(10.0, -snr_db / 10.0), ambient_dc, snr_db};
}

/// phi_k = arg(h_b[k] / h_a[k]) in (-pi, pi]; 0 where h_a[k] == 0.
inline std::vector<double> relative_phase(const std::vector<cplx>& h_a,
                                          const std::vector<cplx>& h_b) {
  std::vector<double> phi(h_a.size(), 0.0);
  for (std::size_t k = 0; k < h_a.size(); ++k) {
    if (h_a[k] == cplx{}) continue;
    double p = std::arg(h_b[k] / h_a[k]);
    if (p <= -kPi) p = kPi;
    phi[k] = p;
  }
  return phi;
}

struct ChannelRealization {
  std::vector<cplx> h_a;
  std::vector<cplx> h_b;
  std::vector<double> phase_offsets;
  bool occluded_a = false;
  bool occluded_b = false;
  NoiseModel noise;

  static ChannelRealization from_coefficients(std::vector<cplx> h_a, std::vector<cplx> h_b,
                                              NoiseModel noise) {
    if (h_a.size() != h_b.size()) throw FramingError("channel coefficient counts differ");
    ChannelRealization ch;
    ch.phase_offsets = relative_phase(h_a, h_b);
    ch.h_a = std::move(h_a);
    ch.h_b = std::move(h_b);
    ch.noise = noise;
    return ch;
  }

  /// Copy with h_b re-phased so that phi_k == phase for every k; magnitudes kept.
  [[nodiscard]] ChannelRealization with_phase_offset(double phase) const {
    std::vector<cplx> hb(h_b.size());
    for (std::size_t k = 0; k < hb.size(); ++k) {
      hb[k] = std::polar(std::abs(h_b[k]), std::arg(h_a[k]) + phase);
    }
    auto out = from_coefficients(h_a, std::move(hb), noise);
    out.occluded_a = occluded_a;
    out.occluded_b = occluded_b;
    return out;
  }
};

/// Lambertian line-of-sight DC gain
///   H = (m + 1) A / (2 pi d^2) cos^m(irradiance) cos(incidence),  m = -ln2 / ln cos(semiangle),
/// and zero outside the receiver field of view.
inline double lambertian_los_gain(const GeometryConfig& geom) {
  if (!(geom.distance_m > 0.0)) throw ConfigError("distance_m must be positive");
  if (geom.incidence_deg > geom.fov_deg) return 0.0;
  const double deg = kPi / 180.0;
  const double m = -std::log(2.0) / std::log(std::cos(geom.led_semiangle_deg * deg));
  const double d2 = geom.distance_m * geom.distance_m;
  return (m + 1.0) * geom.pd_area_m2 / (2.0 * kPi * d2) *
         std::pow(std::cos(geom.irradiance_deg * deg), m) * std::cos(geom.incidence_deg * deg);
}

/// Sizes a realization needs to know about.
struct ChannelDims {
  std::size_t fft_size = 64;
  std::size_t cp_len = 16;
  double sampling_rate_hz = 2e7;
};

namespace detail {

/// Frequency response of one link with unit mean energy.
inline std::vector<cplx> unit_response(const GeometryConfig& geom, const ChannelDims& dims,
                                       Engine& rng) {
  const std::size_t k_size = dims.fft_size;
  if (geom.scenario == LinkScenario::LoS) {
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    return std::vector<cplx>(k_size, std::polar(1.0, phase(rng)));
  }
  const double tau = geom.rms_delay_spread_ns * 1e-9 * dims.sampling_rate_hz;
  if (tau > static_cast<double>(dims.cp_len)) {
    throw ConfigError("rms delay spread of " + std::to_string(tau) +
                      " samples exceeds the cyclic prefix of " + std::to_string(dims.cp_len));
  }
  // exponential power-delay profile on taps 0..cp_len, unit total power
  std::vector<double> power(dims.cp_len + 1, 0.0);
  if (tau <= 0.0) {
    power[0] = 1.0;
  } else {
    double total = 0.0;
    for (std::size_t t = 0; t < power.size(); ++t) {
      power[t] = std::exp(-static_cast<double>(t) / tau);
      total += power[t];
    }
    for (auto& p : power) p /= total;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> taps(power.size());
  for (std::size_t t = 0; t < taps.size(); ++t) {
    const double s = std::sqrt(power[t] / 2.0);
    const double re = gauss(rng);
    const double im = gauss(rng);
    taps[t] = cplx{re * s, im * s};
  }
  std::vector<cplx> h(k_size);
  for (std::size_t k = 0; k < k_size; ++k) {
    cplx acc{};
    for (std::size_t t = 0; t < taps.size(); ++t) {
      acc += taps[t] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * t % k_size) /
                                           static_cast<double>(k_size));
    }
    h[k] = acc;
  }
  return h;
}

}  // namespace detail

/// Draws one frame's channel pair. Lambertian gains are normalized jointly so
/// that their mean energy is 1; the SNR axis therefore is the received SNR.
inline ChannelRealization draw_channel(const GeometryConfig& geom_a, const GeometryConfig& geom_b,
                                       const NoiseModel& noise, const ChannelDims& dims,
                                       Engine& rng) {
  geom_a.validate("geometry_a");
  geom_b.validate("geometry_b");
  const double ga = lambertian_los_gain(geom_a);
  const double gb = lambertian_los_gain(geom_b);
  const double ref = std::sqrt((ga * ga + gb * gb) / 2.0);
  const double na = ref > 0.0 ? ga / ref : 0.0;
  const double nb = ref > 0.0 ? gb / ref : 0.0;

  auto ha = detail::unit_response(geom_a, dims, rng);
  auto hb = detail::unit_response(geom_b, dims, rng);
  std::bernoulli_distribution occl_a(geom_a.occlusion_prob);
  std::bernoulli_distribution occl_b(geom_b.occlusion_prob);
  const bool oa = occl_a(rng);
  const bool ob = occl_b(rng);
  const double att_a = na * (oa ? std::pow(10.0, -geom_a.occlusion_atten_db / 20.0) : 1.0);
  const double att_b = nb * (ob ? std::pow(10.0, -geom_b.occlusion_atten_db / 20.0) : 1.0);
  for (auto& v : ha) v *= att_a;
  for (auto& v : hb) v *= att_b;

  auto ch = ChannelRealization::from_coefficients(std::move(ha), std::move(hb), noise);
  ch.occluded_a = oa;
  ch.occluded_b = ob;
  return ch;
}

namespace detail {

/// Per-symbol multiplication by h in the frequency domain (circular
/// convolution of each CP-stripped body), then re-insertion of the CP.
inline OfdmFrame apply_response(const OfdmFrame& frame, const std::vector<cplx>& h) {
  if (h.size() != frame.fft_size()) {
    throw FramingError("channel has " + std::to_string(h.size()) + " coefficients, frame uses " +
                       std::to_string(frame.fft_size()) + " subcarriers");
  }
  if (frame.samples.size() != frame.expected_samples()) {
    throw FramingError("frame sample count does not match its layout");
  }
  OfdmFrame out = frame;
  for (std::size_t n = 0; n < frame.total_symbols(); ++n) {
    auto freq = unitary_fft(frame.symbol(n).subspan(frame.cp_len));
    for (std::size_t k = 0; k < freq.size(); ++k) freq[k] *= h[k];
    const auto body = unitary_ifft(freq);
    auto dst = out.symbol(n);
    std::copy(body.end() - static_cast<std::ptrdiff_t>(frame.cp_len), body.end(), dst.begin());
    std::copy(body.begin(), body.end(), dst.begin() + static_cast<std::ptrdiff_t>(frame.cp_len));
  }
  return out;
}

/// Circularly-symmetric complex Gaussian noise with variance sigma2 per sample.
/// Under the unitary transform the per-subcarrier variance is also sigma2.
inline void add_awgn(OfdmFrame& frame, double sigma2, Engine& rng) {
  if (sigma2 <= 0.0) return;
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 / 2.0));
  for (auto& s : frame.samples) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    s += cplx{re, im};
  }
}

}  // namespace detail

/// Uplink phase at the relay: Y[k,n] = h_a[k] X_A[k,n] + h_b[k] X_B[k,n] + w[k,n].
inline OfdmFrame superpose_mac_phase(const OfdmFrame& frame_a, const OfdmFrame& frame_b,
                                     const ChannelRealization& ch, Engine& rng) {
  if (!frame_a.same_layout(frame_b)) throw FramingError("uplink frames have different layouts");
  auto out = detail::apply_response(frame_a, ch.h_a);
  const auto faded_b = detail::apply_response(frame_b, ch.h_b);
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += faded_b.samples[i];
  detail::add_awgn(out, ch.noise.sigma2, rng);
  return out;
}

/// Single-transmitter link: Y[k,n] = h[k] X[k,n] + w[k,n].
inline OfdmFrame apply_p2p_channel(const OfdmFrame& frame, const std::vector<cplx>& h,
                                   double sigma2, Engine& rng) {
  auto out = detail::apply_response(frame, h);
  detail::add_awgn(out, sigma2, rng);
  return out;
}

}  // namespace pncvlc
