#pragma once

// Reference XOR decider used to verify the relay demapper. It enumerates the
// 16 (s_A, s_B) hypotheses directly, sums raw Gaussian likelihoods in long
// double and shares no code with pnc_link.hpp.

#include <cmath>
#include <complex>
#include <cstdint>

namespace pncvlc::oracle {

using lcplx = std::complex<long double>;

inline lcplx reference_qpsk(int pair) {
  const long double a = 1.0L / std::sqrt(2.0L);
  const int b0 = (pair >> 1) & 1;
  const int b1 = pair & 1;
  return {b0 == 0 ? a : -a, b1 == 0 ? a : -a};
}

/// argmax over r of sum_{a ^ b == r} exp(-|y - h_a s(a) - h_b s(b)|^2 / sigma2);
/// strict '>' keeps the smallest r on ties.
inline std::uint8_t brute_force_xor(std::complex<double> y, std::complex<double> h_a,
                                    std::complex<double> h_b, double sigma2) {
  long double score[4] = {0.0L, 0.0L, 0.0L, 0.0L};
  const lcplx yy(y.real(), y.imag());
  const lcplx ha(h_a.real(), h_a.imag());
  const lcplx hb(h_b.real(), h_b.imag());
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const lcplx e = yy - ha * reference_qpsk(a) - hb * reference_qpsk(b);
      score[a ^ b] += std::exp(-std::norm(e) / static_cast<long double>(sigma2));
    }
  }
  int best = 0;
  for (int r = 1; r < 4; ++r) {
    if (score[r] > score[best]) best = r;
  }
  return static_cast<std::uint8_t>(best);
}

}  // namespace pncvlc::oracle
