#pragma once

#include <chrono>
#include <complex>
#include <cstdint>
#include <random>

#include "pncvlc/pnc_link.hpp"
#include "pncvlc/rng.hpp"
#include "pncvlc/xor_oracle.hpp"

namespace pncvlc {

struct OracleCheckResult {
  std::uint64_t draws = 0;
  std::uint64_t agreements = 0;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const { return draws > 0 && agreements == draws; }
};

/// Compares xor_map_ml against the brute-force enumerator. Even draws place y
/// on a noisy superposed point; odd draws take y uniformly from [-3, 3]^2.
inline OracleCheckResult run_oracle_check(std::uint64_t draws, std::uint64_t seed = 0) {
  auto rng = make_stream(seed, 0x0AC1E);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> var(0.01, 1.0);
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  std::uniform_int_distribution<int> pair(0, 3);

  OracleCheckResult res;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double ar = gauss(rng), ai = gauss(rng), br = gauss(rng), bi = gauss(rng);
    const cplx ha{ar, ai};
    const cplx hb{br, bi};
    const double s2 = var(rng);
    cplx y;
    if (i % 2 == 0) {
      const int sa = pair(rng), sb = pair(rng);
      const double nr = gauss(rng), ni = gauss(rng);
      y = ha * qpsk_point(static_cast<unsigned>(sa)) + hb * qpsk_point(static_cast<unsigned>(sb)) +
          std::sqrt(s2) * cplx{nr, ni};
    } else {
      const double yr = box(rng), yi = box(rng);
      y = {yr, yi};
    }
    ++res.draws;
    if (xor_map_ml(y, ha, hb, s2) == oracle::brute_force_xor(y, ha, hb, s2)) ++res.agreements;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace pncvlc
