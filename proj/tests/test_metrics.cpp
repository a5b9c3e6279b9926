#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pncvlc/metrics.hpp"

using namespace pncvlc;

namespace {

ScenarioConfig config_for(FramePreset preset) {
  ScenarioConfig cfg;
  cfg.name = "metrics";
  cfg.preset = preset;
  cfg.frame = FrameConfig::for_preset(preset);
  return cfg;
}

BitPacket flipped(BitPacket p, std::initializer_list<std::size_t> at) {
  std::vector<std::uint8_t> bits(p.bits().begin(), p.bits().end());
  for (auto i : at) bits[i] ^= 1;
  return BitPacket(bits);
}

}  // namespace

TEST(ComputeBer, IdenticalAndComplement) {
  auto rng = make_stream(51);
  const auto p = BitPacket::random(1000, rng);
  EXPECT_EQ(compute_ber(p, p), 0.0);
  EXPECT_EQ(compute_ber(p, p ^ BitPacket(std::vector<std::uint8_t>(1000, 1))), 1.0);
}

TEST(ComputeBer, CountsFlips) {
  const auto p = BitPacket::zeros(10000);
  const auto q = flipped(p, {0, 17, 4000, 9998, 9999});
  EXPECT_DOUBLE_EQ(compute_ber(p, q), 5e-4);
  EXPECT_DOUBLE_EQ(compute_ber(q, p), compute_ber(p, q));
}

TEST(ComputeBer, LengthMismatch) {
  EXPECT_THROW(compute_ber(BitPacket::zeros(4), BitPacket::zeros(6)), FramingError);
}

TEST(Throughput, MatchPresetErrorFreePnc) {
  const auto cfg = config_for(FramePreset::paper_match);
  const auto layout = cfg.layout();
  const double eta = 7168.0 / 7410.0;
  EXPECT_DOUBLE_EQ(layout.efficiency(), eta);
  const std::uint64_t exchanges = 10;
  const auto hop_bits = exchanges * 2 * layout.packet_bits() * hops_per_packet(Scheme::PNC);
  const auto tp = compute_throughput(hop_bits, Scheme::PNC, layout, exchanges, 2e7);
  EXPECT_NEAR(tp.bps_hz, 4 * eta, 1e-12);
  EXPECT_NEAR(tp.bps_hz, 3.869, 0.001);
  EXPECT_NEAR(tp.mbps, 77.38, 0.01);
}

TEST(Throughput, SchemeRatios) {
  const auto layout = config_for(FramePreset::conventional).layout();
  const double eta = layout.efficiency();
  auto full = [&](Scheme s) {
    const std::uint64_t hop_bits = 2 * layout.packet_bits() * static_cast<std::uint64_t>(hops_per_packet(s));
    return compute_throughput(hop_bits, s, layout, 1, 2e7).bps_hz;
  };
  EXPECT_NEAR(full(Scheme::Pt2Pt), 2 * eta, 1e-12);
  EXPECT_NEAR(full(Scheme::StoreForward), 2 * eta, 1e-12);
  EXPECT_NEAR(full(Scheme::PNC) / full(Scheme::StoreForward), 2.0, 1e-12);
  EXPECT_NEAR(full(Scheme::PNC) / full(Scheme::Pt2Pt), 2.0, 1e-12);
  EXPECT_EQ(compute_throughput(0, Scheme::PNC, layout, 0, 2e7).bps_hz, 0.0);
}

TEST(Capacity, ReferencePoints) {
  EXPECT_NEAR(compute_capacity(0.0, 1.0, 1, 1), 1.0, 1e-12);
  EXPECT_NEAR(compute_capacity(22.86, 1.0, 1, 1), 7.60, 0.005);
  // PNC: four hop deliveries over two slots
  EXPECT_NEAR(compute_capacity(0.0, Scheme::PNC, 0.5), 1.0, 1e-12);
  EXPECT_NEAR(compute_capacity(0.0, Scheme::StoreForward, 0.5), 0.5, 1e-12);
  EXPECT_THROW(compute_capacity(std::nan(""), 1.0, 1, 1), ConfigError);
}

TEST(Capacity, ErrorFreeThroughputRespectsBoundAboveFiveDb) {
  for (auto preset : {FramePreset::conventional, FramePreset::paper_match}) {
    const double eta = config_for(preset).layout().efficiency();
    for (auto s : kAllSchemes) {
      const double saturated = 4.0 * eta * hops_per_packet(s) / slots_used(s);
      for (double snr = 5.0; snr <= 30.0; snr += 1.0) {
        EXPECT_LE(saturated, compute_capacity(snr, s, eta)) << scheme_name(s) << " " << snr;
      }
    }
  }
}

TEST(EnergyPerBit, Ratios) {
  EXPECT_DOUBLE_EQ(compute_energy_per_bit(1.0, 2), 0.5);
  EXPECT_DOUBLE_EQ(compute_energy_per_bit(2.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(compute_energy_per_bit(1.0, 1) / compute_energy_per_bit(0.9, 1), 1.0 / 0.9);
  EXPECT_EQ(compute_energy_per_bit(3.0, 0), std::numeric_limits<double>::infinity());
}

TEST(MakeReport, FieldsFromTally) {
  const auto cfg = config_for(FramePreset::conventional);
  TrialTally t;
  t.exchanges = 2;
  t.bits = 4 * cfg.packet_bits();
  t.bit_errors = 3;
  t.delivered_info_bits = 3 * cfg.packet_bits();
  t.delivered_hop_bits = 6 * cfg.packet_bits();
  t.tx_energy_units = 6;
  t.relay_bits = 2 * cfg.packet_bits();
  t.relay_bit_errors = 1;
  const auto r = make_report(t, Scheme::PNC, 10.0, cfg);
  EXPECT_EQ(r.scenario, "metrics");
  EXPECT_DOUBLE_EQ(r.ber, 3.0 / static_cast<double>(t.bits));
  EXPECT_DOUBLE_EQ(r.energy_per_bit, 6.0 / static_cast<double>(t.delivered_info_bits));
  EXPECT_DOUBLE_EQ(r.relay_xor_ber, 1.0 / static_cast<double>(t.relay_bits));
  EXPECT_NEAR(r.throughput_bps_hz, 3.0 * cfg.layout().efficiency(), 1e-12);
  EXPECT_TRUE(r.within_shannon_bound());
  EXPECT_EQ(r.n_bits, t.bits);
}

TEST(RunBaseline, NoiselessBaselinesAreErrorFree) {
  auto cfg = config_for(FramePreset::conventional);
  cfg.genie_csi = true;
  auto rng = make_stream(52);
  const double eta = cfg.layout().efficiency();
  for (auto s : {Scheme::StoreForward, Scheme::Pt2Pt}) {
    const auto r = run_baseline(s, cfg, 60.0, 5, rng);
    EXPECT_EQ(r.ber, 0.0) << scheme_name(s);
    EXPECT_EQ(r.tally.delivered_packets, 10U);
    EXPECT_NEAR(r.throughput_bps_hz, 2 * eta, 1e-12);
    EXPECT_DOUBLE_EQ(r.energy_per_bit,
                     slots_used(s) / (2.0 * static_cast<double>(cfg.packet_bits())));
  }
  EXPECT_THROW(run_baseline(Scheme::PNC, cfg, 10.0, 1, rng), ConfigError);
}

TEST(RunBaseline, PncNeedsLessEnergyPerBitThanStoreForward) {
  auto cfg = config_for(FramePreset::conventional);
  cfg.genie_csi = true;
  auto rng = make_stream(53);
  TrialTally pnc;
  for (int i = 0; i < 5; ++i) pnc += run_exchange(cfg, Scheme::PNC, calibrate_noise(60.0), rng);
  const auto pnc_r = make_report(pnc, Scheme::PNC, 60.0, cfg);
  const auto sf_r = run_baseline(Scheme::StoreForward, cfg, 60.0, 5, rng);
  EXPECT_DOUBLE_EQ(pnc_r.energy_per_bit / sf_r.energy_per_bit, 0.5);
}
