#pragma once

// Bit packets, Gray-coded QPSK mapping, pilot framing and the unitary OFDM
// modulate/demodulate chain shared by the end nodes and the relay.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pncvlc/errors.hpp"
#include "pncvlc/fft.hpp"
#include "pncvlc/rng.hpp"

namespace pncvlc {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// BitPacket
// ---------------------------------------------------------------------------

/// Ordered binary sequence of even length. Elements are 0 or 1.
class BitPacket {
 public:
  BitPacket() = default;

  explicit BitPacket(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.size() % 2 != 0) {
      throw FramingError("bit packet length " + std::to_string(bits_.size()) + " is odd");
    }
    for (auto b : bits_) {
      if (b > 1) throw PreconditionError("bit packet element outside {0,1}");
    }
  }

  static BitPacket zeros(std::size_t length) {
    return BitPacket(std::vector<std::uint8_t>(length, 0));
  }

  static BitPacket random(std::size_t length, Engine& rng) {
    std::vector<std::uint8_t> bits(length);
    std::bernoulli_distribution coin(0.5);
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
    return BitPacket(std::move(bits));
  }

  [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
  [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }
  [[nodiscard]] std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend BitPacket operator^(const BitPacket& lhs, const BitPacket& rhs) {
    if (lhs.size() != rhs.size()) {
      throw FramingError("xor of packets with lengths " + std::to_string(lhs.size()) + " and " +
                         std::to_string(rhs.size()));
    }
    std::vector<std::uint8_t> out(lhs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lhs.bits_[i] ^ rhs.bits_[i];
    return BitPacket(std::move(out));
  }

  friend bool operator==(const BitPacket&, const BitPacket&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Subcarrier map and frame layout
// ---------------------------------------------------------------------------

/// Which of the fft_size subcarriers carry data (and pilots). The rest are nulls.
class SubcarrierMap {
 public:
  SubcarrierMap() = default;

  SubcarrierMap(std::size_t fft_size, std::vector<std::size_t> data)
      : fft_size_(fft_size), data_(std::move(data)) {
    if (fft_size_ == 0) throw ConfigError("fft_size must be positive");
    if (data_.empty()) throw ConfigError("subcarrier map has no data subcarriers");
    std::sort(data_.begin(), data_.end());
    if (std::adjacent_find(data_.begin(), data_.end()) != data_.end()) {
      throw ConfigError("duplicate data subcarrier index");
    }
    if (data_.back() >= fft_size_) throw ConfigError("data subcarrier index >= fft_size");
  }

  /// Every subcarrier carries data.
  static SubcarrierMap full(std::size_t fft_size) {
    std::vector<std::size_t> data(fft_size);
    std::iota(data.begin(), data.end(), std::size_t{0});
    return SubcarrierMap(fft_size, std::move(data));
  }

  /// DC plus a guard band centred on the Nyquist bin are nulled; n_data
  /// subcarriers remain. n_data == fft_size gives the full map.
  static SubcarrierMap guarded(std::size_t fft_size, std::size_t n_data) {
    if (n_data == 0 || n_data > fft_size) {
      throw ConfigError("data subcarrier count " + std::to_string(n_data) +
                        " not in [1, fft_size]");
    }
    if (n_data == fft_size) return full(fft_size);
    const std::size_t guards = fft_size - 1 - n_data;
    const std::size_t first_guard = fft_size / 2 - guards / 2;
    std::vector<std::size_t> data;
    data.reserve(n_data);
    for (std::size_t k = 1; k < fft_size; ++k) {
      if (k >= first_guard && k < first_guard + guards) continue;
      data.push_back(k);
    }
    return SubcarrierMap(fft_size, std::move(data));
  }

  [[nodiscard]] std::size_t fft_size() const noexcept { return fft_size_; }
  [[nodiscard]] std::size_t n_data() const noexcept { return data_.size(); }
  [[nodiscard]] std::span<const std::size_t> data() const noexcept { return data_; }
  [[nodiscard]] bool has_nulls() const noexcept { return data_.size() < fft_size_; }
  [[nodiscard]] bool is_data(std::size_t k) const {
    return std::binary_search(data_.begin(), data_.end(), k);
  }

  friend bool operator==(const SubcarrierMap&, const SubcarrierMap&) = default;

 private:
  std::size_t fft_size_ = 0;
  std::vector<std::size_t> data_;
};

inline constexpr std::size_t kPilotSymbols = 2;

/// Frame geometry shared by every slot of an exchange.
struct FrameLayout {
  SubcarrierMap map;
  std::size_t cp_len = 16;
  std::size_t n_data_symbols = 16;

  [[nodiscard]] std::size_t fft_size() const noexcept { return map.fft_size(); }
  [[nodiscard]] std::size_t packet_bits() const noexcept {
    return 2 * map.n_data() * n_data_symbols;
  }
  /// Samples occupied by one slot: data plus pilot symbols, each with its CP.
  [[nodiscard]] std::size_t samples_per_slot() const noexcept {
    return (n_data_symbols + kPilotSymbols) * (fft_size() + cp_len);
  }
  /// Fraction of slot samples that carry data resource elements.
  [[nodiscard]] double efficiency() const noexcept {
    return static_cast<double>(map.n_data() * n_data_symbols) /
           static_cast<double>(samples_per_slot());
  }
};

// ---------------------------------------------------------------------------
// Symbol grid
// ---------------------------------------------------------------------------

/// fft_size x n_symbols frequency-domain matrix, stored column-major. The first
/// n_pilots columns are pilot symbols; the remainder carry data.
struct QpskSymbolGrid {
  SubcarrierMap map;
  std::size_t n_symbols = 0;
  std::size_t n_pilots = 0;
  std::vector<cplx> values;

  static QpskSymbolGrid zeros(SubcarrierMap map, std::size_t n_symbols, std::size_t n_pilots = 0) {
    QpskSymbolGrid g;
    g.values.assign(map.fft_size() * n_symbols, cplx{});
    g.map = std::move(map);
    g.n_symbols = n_symbols;
    g.n_pilots = n_pilots;
    return g;
  }

  [[nodiscard]] std::size_t fft_size() const noexcept { return map.fft_size(); }
  [[nodiscard]] std::size_t n_data_symbols() const noexcept { return n_symbols - n_pilots; }

  cplx& at(std::size_t k, std::size_t n) { return values[n * fft_size() + k]; }
  [[nodiscard]] const cplx& at(std::size_t k, std::size_t n) const {
    return values[n * fft_size() + k];
  }

  std::span<cplx> column(std::size_t n) {
    return std::span<cplx>(values).subspan(n * fft_size(), fft_size());
  }
  [[nodiscard]] std::span<const cplx> column(std::size_t n) const {
    return std::span<const cplx>(values).subspan(n * fft_size(), fft_size());
  }
};

// ---------------------------------------------------------------------------
// QPSK
// ---------------------------------------------------------------------------

/// Gray mapping: (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
constexpr cplx qpsk_point(unsigned b0, unsigned b1) noexcept {
  constexpr double a = 0.70710678118654752440;
  return {b0 ? -a : a, b1 ? -a : a};
}

/// Same point indexed by the 2-bit value (b0 << 1) | b1.
constexpr cplx qpsk_point(unsigned pair) noexcept { return qpsk_point((pair >> 1) & 1U, pair & 1U); }

/// Bits fill data subcarriers first, then successive symbols.
inline QpskSymbolGrid qpsk_map(const BitPacket& bits, const SubcarrierMap& map) {
  const std::size_t per_symbol = 2 * map.n_data();
  if (bits.empty() || bits.size() % per_symbol != 0) {
    throw FramingError("packet of " + std::to_string(bits.size()) +
                       " bits is not a positive multiple of 2*K_data = " +
                       std::to_string(per_symbol));
  }
  auto grid = QpskSymbolGrid::zeros(map, bits.size() / per_symbol);
  const auto data = map.data();
  std::size_t p = 0;
  for (std::size_t n = 0; n < grid.n_symbols; ++n) {
    for (auto k : data) {
      grid.at(k, n) = qpsk_point(bits[p], bits[p + 1]);
      p += 2;
    }
  }
  return grid;
}

/// Hard nearest-point decision over the data columns. noise_variance is
/// accepted for interface symmetry with soft demappers; hard decisions ignore it.
inline BitPacket qpsk_demap(const QpskSymbolGrid& symbols, double /*noise_variance*/ = 1.0) {
  std::vector<std::uint8_t> bits;
  bits.reserve(2 * symbols.map.n_data() * symbols.n_data_symbols());
  for (std::size_t n = symbols.n_pilots; n < symbols.n_symbols; ++n) {
    for (auto k : symbols.map.data()) {
      const cplx v = symbols.at(k, n);
      bits.push_back(v.real() < 0.0 ? 1 : 0);
      bits.push_back(v.imag() < 0.0 ? 1 : 0);
    }
  }
  return BitPacket(std::move(bits));
}

// ---------------------------------------------------------------------------
// Pilots
// ---------------------------------------------------------------------------

enum class NodeId { A, B };

/// Known per-node training values, one per data subcarrier (in map order).
struct PilotSequences {
  std::vector<cplx> a;
  std::vector<cplx> b;

  /// Zadoff-Chu sequences of length n with the given roots. Roots must be
  /// coprime with n so that every value has unit magnitude and the sequence
  /// is CAZAC.
  static PilotSequences zadoff_chu(std::size_t n, std::size_t root_a = 1, std::size_t root_b = 0) {
    if (n == 0) throw ConfigError("pilot length must be positive");
    if (root_b == 0) {
      root_b = root_a + 1;
      while (std::gcd(root_b, n) != 1) ++root_b;
    }
    for (auto root : {root_a, root_b}) {
      if (root == 0 || std::gcd(root, n) != 1) {
        throw ConfigError("Zadoff-Chu root " + std::to_string(root) + " is not coprime with " +
                          std::to_string(n));
      }
    }
    auto seq = [n](std::size_t root) {
      std::vector<cplx> s(n);
      const double len = static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double m = static_cast<double>(i);
        const double arg = (n % 2 == 0) ? m * m : m * (m + 1.0);
        // reduce the phase before multiplying to keep precision for long sequences
        const double phase = std::fmod(static_cast<double>(root) * arg, 2.0 * len);
        s[i] = std::polar(1.0, -kPi * phase / len);
      }
      return s;
    };
    return {seq(root_a), seq(root_b)};
  }

  [[nodiscard]] const std::vector<cplx>& of(NodeId node) const { return node == NodeId::A ? a : b; }
};

/// Prepends two time-orthogonal pilot symbols: slot 0 carries node A's
/// sequence, slot 1 carries node B's. The other node's slot stays silent.
inline QpskSymbolGrid build_frame(const QpskSymbolGrid& data, NodeId node,
                                  const PilotSequences& pilots) {
  if (data.n_pilots != 0) throw PreconditionError("build_frame: grid already has pilots");
  const auto& seq = pilots.of(node);
  if (seq.size() != data.map.n_data()) {
    throw FramingError("pilot length " + std::to_string(seq.size()) +
                       " does not match data subcarrier count " +
                       std::to_string(data.map.n_data()));
  }
  auto frame = QpskSymbolGrid::zeros(data.map, data.n_symbols + kPilotSymbols, kPilotSymbols);
  const std::size_t slot = node == NodeId::A ? 0 : 1;
  const auto idx = data.map.data();
  for (std::size_t i = 0; i < idx.size(); ++i) frame.at(idx[i], slot) = seq[i];
  std::copy(data.values.begin(), data.values.end(),
            frame.values.begin() + static_cast<std::ptrdiff_t>(kPilotSymbols * data.fft_size()));
  return frame;
}

// ---------------------------------------------------------------------------
// OFDM
// ---------------------------------------------------------------------------

/// Time-domain sample stream: (n_symbols + n_pilots) blocks of cp_len + fft_size.
struct OfdmFrame {
  std::vector<cplx> samples;
  std::size_t cp_len = 0;
  SubcarrierMap map;
  std::size_t n_symbols = 0;  // data symbols
  std::size_t n_pilots = 0;
  double clipping_distortion_power = 0.0;

  [[nodiscard]] std::size_t fft_size() const noexcept { return map.fft_size(); }
  [[nodiscard]] std::size_t symbol_len() const noexcept { return fft_size() + cp_len; }
  [[nodiscard]] std::size_t total_symbols() const noexcept { return n_symbols + n_pilots; }
  [[nodiscard]] std::size_t expected_samples() const noexcept {
    return total_symbols() * symbol_len();
  }

  [[nodiscard]] bool same_layout(const OfdmFrame& other) const {
    return cp_len == other.cp_len && map == other.map && n_symbols == other.n_symbols &&
           n_pilots == other.n_pilots && samples.size() == other.samples.size();
  }

  std::span<cplx> symbol(std::size_t i) {
    return std::span<cplx>(samples).subspan(i * symbol_len(), symbol_len());
  }
  [[nodiscard]] std::span<const cplx> symbol(std::size_t i) const {
    return std::span<const cplx>(samples).subspan(i * symbol_len(), symbol_len());
  }
};

inline OfdmFrame ofdm_modulate(const QpskSymbolGrid& grid, std::size_t cp_len) {
  const std::size_t k = grid.fft_size();
  if (cp_len >= k) {
    throw ConfigError("cp_len " + std::to_string(cp_len) + " must be below fft_size " +
                      std::to_string(k));
  }
  OfdmFrame frame;
  frame.cp_len = cp_len;
  frame.map = grid.map;
  frame.n_pilots = grid.n_pilots;
  frame.n_symbols = grid.n_symbols - grid.n_pilots;
  frame.samples.resize(frame.expected_samples());
  for (std::size_t n = 0; n < grid.n_symbols; ++n) {
    const auto body = unitary_ifft(grid.column(n));
    auto out = frame.symbol(n);
    std::copy(body.end() - static_cast<std::ptrdiff_t>(cp_len), body.end(), out.begin());
    std::copy(body.begin(), body.end(), out.begin() + static_cast<std::ptrdiff_t>(cp_len));
  }
  return frame;
}

inline QpskSymbolGrid ofdm_demodulate(const OfdmFrame& frame) {
  if (frame.samples.size() != frame.expected_samples()) {
    throw FramingError("frame holds " + std::to_string(frame.samples.size()) +
                       " samples, layout expects " + std::to_string(frame.expected_samples()));
  }
  auto grid = QpskSymbolGrid::zeros(frame.map, frame.total_symbols(), frame.n_pilots);
  for (std::size_t n = 0; n < frame.total_symbols(); ++n) {
    const auto body = frame.symbol(n).subspan(frame.cp_len);
    const auto freq = unitary_fft(body);
    std::copy(freq.begin(), freq.end(), grid.column(n).begin());
  }
  return grid;
}

/// Real-valued intensity drive: Re{x} + dc_bias, clipped from below at
/// clip_floor. The mean power of the clipping error is recorded on the frame.
inline OfdmFrame intensity_frontend(const OfdmFrame& frame, double dc_bias, double clip_floor) {
  if (dc_bias < 0.0) throw PreconditionError("dc_bias must be non-negative");
  OfdmFrame out = frame;
  double distortion = 0.0;
  for (auto& s : out.samples) {
    const double drive = s.real() + dc_bias;
    const double clipped = std::max(drive, clip_floor);
    distortion += (clipped - drive) * (clipped - drive);
    s = cplx{clipped, 0.0};
  }
  out.clipping_distortion_power =
      out.samples.empty() ? 0.0 : distortion / static_cast<double>(out.samples.size());
  return out;
}

}  // namespace pncvlc
