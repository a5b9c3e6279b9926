#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "pncvlc/ofdm_phy.hpp"
#include "support/dft_oracle.hpp"

using namespace pncvlc;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

QpskSymbolGrid random_grid(const SubcarrierMap& map, std::size_t n, Engine& rng) {
  auto g = QpskSymbolGrid::zeros(map, n);
  std::normal_distribution<double> gauss;
  for (auto& v : g.values) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v = {re, im};
  }
  return g;
}

}  // namespace

TEST(BitPacket, RejectsOddLengthAndNonBinary) {
  EXPECT_THROW(BitPacket({1, 0, 1}), FramingError);
  EXPECT_THROW(BitPacket({0, 2}), PreconditionError);
  EXPECT_NO_THROW(BitPacket({0, 1}));
}

TEST(BitPacket, XorRequiresEqualLength) {
  EXPECT_THROW(BitPacket::zeros(4) ^ BitPacket::zeros(6), FramingError);
  EXPECT_EQ(BitPacket({1, 1, 0, 1}) ^ BitPacket({1, 0, 0, 1}), BitPacket({0, 1, 0, 0}));
}

TEST(SubcarrierMap, GuardedDefaultLayout) {
  const auto map = SubcarrierMap::guarded(64, 52);
  EXPECT_EQ(map.n_data(), 52U);
  EXPECT_FALSE(map.is_data(0));
  for (std::size_t k = 27; k <= 37; ++k) EXPECT_FALSE(map.is_data(k)) << k;
  EXPECT_TRUE(map.is_data(1));
  EXPECT_TRUE(map.is_data(26));
  EXPECT_TRUE(map.is_data(38));
  EXPECT_TRUE(map.is_data(63));
  EXPECT_FALSE(SubcarrierMap::guarded(64, 64).has_nulls());
}

TEST(FrameLayout, EfficiencyCountsCpAndPilots) {
  const FrameLayout conventional{SubcarrierMap::guarded(64, 52), 16, 16};
  EXPECT_DOUBLE_EQ(conventional.efficiency(), 52.0 * 16 / (18.0 * 80));
  EXPECT_EQ(conventional.packet_bits(), 2U * 52 * 16);
}

TEST(QpskMap, GrayPoints) {
  const auto map = SubcarrierMap::full(1);
  auto g00 = qpsk_map(BitPacket({0, 0}), map);
  auto g11 = qpsk_map(BitPacket({1, 1}), map);
  EXPECT_NEAR(std::abs(g00.at(0, 0) - cplx(kInvSqrt2, kInvSqrt2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g11.at(0, 0) - cplx(-kInvSqrt2, -kInvSqrt2)), 0.0, 1e-15);
}

TEST(QpskMap, FillsDataSubcarriersThenSymbols) {
  const auto map = SubcarrierMap::full(2);
  const auto g = qpsk_map(BitPacket({0, 1, 1, 0}), map);
  ASSERT_EQ(g.n_symbols, 1U);
  EXPECT_NEAR(std::abs(g.at(0, 0) - cplx(kInvSqrt2, -kInvSqrt2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.at(1, 0) - cplx(-kInvSqrt2, kInvSqrt2)), 0.0, 1e-15);

  // second symbol starts after K_data pairs
  const auto g2 = qpsk_map(BitPacket({0, 0, 0, 0, 1, 1, 0, 0}), map);
  ASSERT_EQ(g2.n_symbols, 2U);
  EXPECT_LT(g2.at(0, 1).real(), 0.0);
}

TEST(QpskMap, FramingErrorOnPartialSymbol) {
  EXPECT_THROW(qpsk_map(BitPacket::zeros(6), SubcarrierMap::full(2)), FramingError);
  EXPECT_THROW(qpsk_map(BitPacket{}, SubcarrierMap::full(2)), FramingError);
}

TEST(QpskMap, UnitEnergyAndGrayAdjacency) {
  for (unsigned a = 0; a < 4; ++a) {
    EXPECT_NEAR(std::norm(qpsk_point(a)), 1.0, 1e-15);
    for (unsigned b = 0; b < 4; ++b) {
      const double d = std::abs(qpsk_point(a) - qpsk_point(b));
      if (std::abs(d - std::sqrt(2.0)) < 1e-12) {
        EXPECT_EQ(__builtin_popcount(a ^ b), 1) << a << " vs " << b;
      }
    }
  }
}

TEST(QpskDemap, NearestPointRegions) {
  const auto map = SubcarrierMap::full(1);
  auto g = QpskSymbolGrid::zeros(map, 1);
  g.at(0, 0) = {0.9, 1.1};
  EXPECT_EQ(qpsk_demap(g), BitPacket({0, 0}));
  g.at(0, 0) = {-0.2, 3.0};
  EXPECT_EQ(qpsk_demap(g), BitPacket({1, 0}));
  g.at(0, 0) = {kInvSqrt2, kInvSqrt2};
  EXPECT_EQ(qpsk_demap(g), BitPacket({0, 0}));
}

TEST(QpskDemap, InvertsMapOnRandomPackets) {
  auto rng = make_stream(7);
  const auto map = SubcarrierMap::guarded(64, 52);
  for (std::size_t n : {1U, 3U, 16U}) {
    const auto p = BitPacket::random(2 * 52 * n, rng);
    const auto g = qpsk_map(p, map);
    double energy = 0.0;
    for (auto k : map.data()) {
      for (std::size_t s = 0; s < g.n_symbols; ++s) energy += std::norm(g.at(k, s));
    }
    EXPECT_NEAR(energy / static_cast<double>(52 * n), 1.0, 1e-12);
    EXPECT_EQ(qpsk_demap(g), p);
  }
}

TEST(Pilots, ZadoffChuUnitMagnitudeAndDistinctRoots) {
  const auto p = PilotSequences::zadoff_chu(52);
  ASSERT_EQ(p.a.size(), 52U);
  for (std::size_t i = 0; i < 52; ++i) {
    EXPECT_NEAR(std::abs(p.a[i]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(p.b[i]), 1.0, 1e-12);
  }
  EXPECT_NE(p.a, p.b);
  EXPECT_THROW(PilotSequences::zadoff_chu(52, 2), ConfigError);
}

TEST(BuildFrame, TimeOrthogonalPilotSlots) {
  auto rng = make_stream(1);
  const auto map = SubcarrierMap::guarded(64, 52);
  const auto pilots = PilotSequences::zadoff_chu(52);
  const auto data = qpsk_map(BitPacket::random(2 * 52 * 4, rng), map);

  const auto fa = build_frame(data, NodeId::A, pilots);
  const auto fb = build_frame(data, NodeId::B, pilots);
  EXPECT_EQ(fa.n_symbols, 6U);
  EXPECT_EQ(fa.n_pilots, 2U);
  for (std::size_t k = 0; k < 64; ++k) {
    EXPECT_EQ(fa.at(k, 1), cplx{});
    EXPECT_EQ(fb.at(k, 0), cplx{});
  }
  EXPECT_EQ(fa.at(map.data()[0], 0), pilots.a[0]);
  EXPECT_EQ(fb.at(map.data()[5], 1), pilots.b[5]);
  EXPECT_EQ(fa.at(3, 2), data.at(3, 0));
  EXPECT_THROW(build_frame(fa, NodeId::A, pilots), PreconditionError);
}

TEST(OfdmModulate, ZeroGridGivesZeroSamples) {
  const auto g = QpskSymbolGrid::zeros(SubcarrierMap::full(16), 3);
  const auto f = ofdm_modulate(g, 4);
  EXPECT_EQ(f.samples.size(), 3U * 20);
  for (auto s : f.samples) EXPECT_EQ(s, cplx{});
  for (auto v : ofdm_demodulate(f).values) EXPECT_EQ(v, cplx{});
}

TEST(OfdmModulate, SingleToneIsConstantBody) {
  auto g = QpskSymbolGrid::zeros(SubcarrierMap::full(4), 1);
  g.at(0, 0) = {0.6, -0.8};
  const auto f = ofdm_modulate(g, 1);
  ASSERT_EQ(f.samples.size(), 5U);
  for (auto s : f.samples) EXPECT_NEAR(std::abs(s - g.at(0, 0) / 2.0), 0.0, 1e-15);
}

TEST(OfdmModulate, MatchesDirectDftWithCyclicPrefix) {
  auto rng = make_stream(3);
  for (std::size_t k : {8U, 12U, 64U}) {
    const auto g = random_grid(SubcarrierMap::full(k), 2, rng);
    const std::size_t cp = k / 4;
    const auto f = ofdm_modulate(g, cp);
    for (std::size_t n = 0; n < 2; ++n) {
      const auto expect = test::naive_dft(g.column(n), true);
      const auto sym = f.symbol(n);
      for (std::size_t t = 0; t < k; ++t) EXPECT_NEAR(std::abs(sym[cp + t] - expect[t]), 0.0, 1e-12);
      for (std::size_t t = 0; t < cp; ++t) EXPECT_EQ(sym[t], sym[k + t]);
    }
  }
}

TEST(OfdmModulate, Parseval) {
  auto rng = make_stream(4);
  const auto g = random_grid(SubcarrierMap::full(64), 5, rng);
  const auto f = ofdm_modulate(g, 16);
  for (std::size_t n = 0; n < 5; ++n) {
    double time = 0.0;
    double freq = 0.0;
    for (auto s : f.symbol(n).subspan(16)) time += std::norm(s);
    for (auto v : g.column(n)) freq += std::norm(v);
    EXPECT_NEAR(time / 64.0, freq / 64.0, 1e-10);
  }
}

TEST(OfdmModulate, RejectsCpNotBelowFftSize) {
  const auto g = QpskSymbolGrid::zeros(SubcarrierMap::full(16), 1);
  EXPECT_THROW(ofdm_modulate(g, 16), ConfigError);
}

TEST(OfdmDemodulate, RoundTripProperty) {
  auto rng = make_stream(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_grid(SubcarrierMap::full(64), 8, rng);
    const auto back = ofdm_demodulate(ofdm_modulate(g, 16));
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      ASSERT_LT(std::abs(back.values[i] - g.values[i]), 1e-10);
    }
  }
}

TEST(OfdmDemodulate, FramingErrorOnSampleMismatch) {
  auto f = ofdm_modulate(QpskSymbolGrid::zeros(SubcarrierMap::full(16), 2), 4);
  f.samples.pop_back();
  EXPECT_THROW(ofdm_demodulate(f), FramingError);
}

TEST(IntensityFrontend, BiasAndClipping) {
  auto f = ofdm_modulate(QpskSymbolGrid::zeros(SubcarrierMap::full(8), 1), 2);
  const auto biased = intensity_frontend(f, 1.0, 0.0);
  for (auto s : biased.samples) EXPECT_EQ(s, cplx(1.0, 0.0));
  EXPECT_EQ(biased.clipping_distortion_power, 0.0);

  f.samples.assign(f.samples.size(), cplx{});
  f.samples[0] = {-2.0, 0.5};
  const auto clipped = intensity_frontend(f, 1.0, 0.0);
  EXPECT_EQ(clipped.samples[0], cplx(0.0, 0.0));
  EXPECT_NEAR(clipped.clipping_distortion_power, 1.0 / static_cast<double>(f.samples.size()), 1e-15);

  EXPECT_THROW(intensity_frontend(f, -0.1, 0.0), PreconditionError);
}

TEST(IntensityFrontend, LargeBiasAvoidsClipping) {
  auto rng = make_stream(6);
  const auto f = ofdm_modulate(random_grid(SubcarrierMap::full(64), 4, rng), 16);
  EXPECT_EQ(intensity_frontend(f, 100.0, 0.0).clipping_distortion_power, 0.0);
}
