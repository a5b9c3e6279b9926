#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace pncvlc {

using cplx = std::complex<double>;

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  // plan cache is per-instance; one per thread keeps concurrent trials independent
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::Unscaled);
    return e;
  }();
  return engine;
}
}  // namespace detail

/// Forward DFT with 1/sqrt(K) scaling (unitary).
inline std::vector<cplx> unitary_fft(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  if (in.empty()) return out;
  detail::fft_engine().fwd(out.data(), in.data(), static_cast<Eigen::Index>(in.size()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
  for (auto& v : out) v *= scale;
  return out;
}

/// Inverse DFT with 1/sqrt(K) scaling (unitary).
inline std::vector<cplx> unitary_ifft(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  if (in.empty()) return out;
  detail::fft_engine().inv(out.data(), in.data(), static_cast<Eigen::Index>(in.size()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace pncvlc
