#pragma once

// Scenario configuration: JSON schema, defaults, validation and canonical
// serialization.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "pncvlc/errors.hpp"
#include "pncvlc/integrity.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/pnc_link.hpp"
#include "pncvlc/scheme.hpp"
#include "pncvlc/vlc_channel.hpp"

namespace pncvlc {

using json = nlohmann::json;

enum class FramePreset { conventional, paper_match };

inline std::string preset_name(FramePreset p) {
  return p == FramePreset::conventional ? "conventional" : "paper-match";
}

inline FramePreset parse_preset(const std::string& name) {
  if (name == "conventional") return FramePreset::conventional;
  if (name == "paper-match") return FramePreset::paper_match;
  throw ConfigError("unknown frame preset '" + name + "' (expected conventional|paper-match)");
}

struct FrameConfig {
  std::size_t fft_size = 64;
  std::size_t n_data_subcarriers = 52;
  std::size_t cp_len = 16;
  std::size_t n_data_symbols = 16;

  /// conventional: 64 subcarriers, 52 data, CP 16.
  /// paper-match: all 64 subcarriers, CP 1, 112 data symbols; overhead
  /// efficiency 7168/7410 = 0.96734, i.e. an error-free PNC sum rate of 3.869 bps/Hz.
  static FrameConfig for_preset(FramePreset p) {
    if (p == FramePreset::paper_match) return FrameConfig{64, 64, 1, 112};
    return FrameConfig{};
  }

  friend bool operator==(const FrameConfig&, const FrameConfig&) = default;
};

struct SnrSweep {
  double start_db = 0.0;
  double stop_db = 24.0;
  double step_db = 2.0;

  [[nodiscard]] std::vector<double> points() const {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(start_db + step_db * static_cast<double>(i));
    return out;
  }

  friend bool operator==(const SnrSweep&, const SnrSweep&) = default;
};

struct LinkGeometries {
  GeometryConfig a_to_relay;
  GeometryConfig b_to_relay;
  GeometryConfig relay_to_a;
  GeometryConfig relay_to_b;

  friend bool operator==(const LinkGeometries&, const LinkGeometries&) = default;
};

struct ScenarioConfig {
  std::string name;
  LinkGeometries links;
  SnrSweep snr_sweep;
  std::vector<Scheme> schemes{Scheme::PNC};
  FramePreset preset = FramePreset::conventional;
  FrameConfig frame;
  std::size_t frames_per_point = 1;
  std::uint64_t min_bits_per_point = 100000;
  std::uint64_t master_seed = 0;
  double sampling_rate_hz = 2e7;
  bool genie_csi = false;
  Likelihood likelihood = Likelihood::exact;
  bool downlink_estimation = false;
  std::optional<double> phase_offset_rad;  // forces phi_k on the uplink when set
  double ambient_dc = 0.0;
  std::size_t pilot_root_a = 1;
  std::size_t pilot_root_b = 0;  // 0 = smallest root above pilot_root_a coprime with K_data

  [[nodiscard]] FrameLayout layout() const {
    return FrameLayout{SubcarrierMap::guarded(frame.fft_size, frame.n_data_subcarriers),
                       frame.cp_len, frame.n_data_symbols};
  }
  [[nodiscard]] PilotSequences pilots() const {
    return PilotSequences::zadoff_chu(frame.n_data_subcarriers, pilot_root_a, pilot_root_b);
  }
  [[nodiscard]] ChannelDims dims() const {
    return ChannelDims{frame.fft_size, frame.cp_len, sampling_rate_hz};
  }
  [[nodiscard]] std::size_t packet_bits() const { return layout().packet_bits(); }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ConfigError with the field path of the first violated invariant.
inline void validate(const ScenarioConfig& cfg) {
  if (cfg.name.empty()) throw ConfigError("name: must be non-empty");
  const auto& sw = cfg.snr_sweep;
  if (!std::isfinite(sw.start_db) || !std::isfinite(sw.stop_db) || !std::isfinite(sw.step_db)) {
    throw ConfigError("snr_sweep: values must be finite");
  }
  if (!(sw.step_db > 0.0)) throw ConfigError("snr_sweep.step_db: must be positive");
  if (!(sw.stop_db >= sw.start_db)) throw ConfigError("snr_sweep.stop_db: must be >= start_db");
  if (cfg.schemes.empty()) throw ConfigError("schemes: must list at least one scheme");
  std::set<Scheme> seen(cfg.schemes.begin(), cfg.schemes.end());
  if (seen.size() != cfg.schemes.size()) throw ConfigError("schemes: duplicate entry");
  const auto& f = cfg.frame;
  if (f.fft_size < 2) throw ConfigError("frame.fft_size: must be at least 2");
  if (f.n_data_subcarriers == 0 || f.n_data_subcarriers > f.fft_size) {
    throw ConfigError("frame.n_data_subcarriers: must lie in [1, fft_size]");
  }
  if (f.cp_len >= f.fft_size) throw ConfigError("frame.cp_len: must be below fft_size");
  if (f.n_data_symbols == 0) throw ConfigError("frame.n_data_symbols: must be positive");
  if (2 * f.n_data_subcarriers * f.n_data_symbols <= kCrcBits) {
    throw ConfigError("frame: packet must be longer than the 32-bit CRC");
  }
  if (cfg.frames_per_point < 1) throw ConfigError("frames_per_point: must be at least 1");
  if (!(cfg.sampling_rate_hz > 0.0)) throw ConfigError("sampling_rate_hz: must be positive");
  if (cfg.phase_offset_rad && !std::isfinite(*cfg.phase_offset_rad)) {
    throw ConfigError("phase_offset_rad: must be finite");
  }
  cfg.links.a_to_relay.validate("links.a_to_relay");
  cfg.links.b_to_relay.validate("links.b_to_relay");
  cfg.links.relay_to_a.validate("links.relay_to_a");
  cfg.links.relay_to_b.validate("links.relay_to_b");
  const double tau_ns = static_cast<double>(f.cp_len) / cfg.sampling_rate_hz * 1e9;
  for (const auto* g : {&cfg.links.a_to_relay, &cfg.links.b_to_relay, &cfg.links.relay_to_a,
                        &cfg.links.relay_to_b}) {
    if (g->scenario == LinkScenario::NLoS && g->rms_delay_spread_ns > tau_ns + 1e-9) {
      throw ConfigError("links: rms_delay_spread_ns exceeds the cyclic prefix duration");
    }
  }
  try {
    (void)cfg.pilots();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("pilot_roots: ") + e.what());
  }
}

namespace detail {

/// Reads typed fields from one JSON object and rejects keys never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_unsigned()) throw ConfigError(field(key) + ": expected a non-negative integer");
    }
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  [[nodiscard]] const json* child(const std::string& key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

  [[nodiscard]] std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

inline GeometryConfig read_geometry(const json& obj, const std::string& path, GeometryConfig g) {
  ObjectReader r(obj, path);
  r.read("distance_m", g.distance_m);
  r.read("led_semiangle_deg", g.led_semiangle_deg);
  r.read("pd_area_m2", g.pd_area_m2);
  r.read("irradiance_deg", g.irradiance_deg);
  r.read("incidence_deg", g.incidence_deg);
  r.read("fov_deg", g.fov_deg);
  std::string scenario = g.scenario == LinkScenario::LoS ? "LoS" : "NLoS";
  r.read("scenario", scenario);
  if (scenario == "LoS") {
    g.scenario = LinkScenario::LoS;
  } else if (scenario == "NLoS") {
    g.scenario = LinkScenario::NLoS;
  } else {
    throw ConfigError(r.field("scenario") + ": expected LoS or NLoS");
  }
  r.read("rms_delay_spread_ns", g.rms_delay_spread_ns);
  r.read("occlusion_prob", g.occlusion_prob);
  r.read("occlusion_atten_db", g.occlusion_atten_db);
  r.finish();
  return g;
}

inline json geometry_to_json(const GeometryConfig& g) {
  return json{{"distance_m", g.distance_m},
              {"led_semiangle_deg", g.led_semiangle_deg},
              {"pd_area_m2", g.pd_area_m2},
              {"irradiance_deg", g.irradiance_deg},
              {"incidence_deg", g.incidence_deg},
              {"fov_deg", g.fov_deg},
              {"scenario", g.scenario == LinkScenario::LoS ? "LoS" : "NLoS"},
              {"rms_delay_spread_ns", g.rms_delay_spread_ns},
              {"occlusion_prob", g.occlusion_prob},
              {"occlusion_atten_db", g.occlusion_atten_db}};
}

}  // namespace detail

/// Builds a validated config from a parsed JSON document. The frame preset
/// fills the frame first; explicit "frame" fields and "packet_bits" override it.
inline ScenarioConfig parse_config(const json& doc,
                                   std::optional<FramePreset> preset_override = std::nullopt) {
  ScenarioConfig cfg;
  detail::ObjectReader root(doc, "");
  root.read("name", cfg.name);

  if (const json* sw = root.child("snr_sweep")) {
    detail::ObjectReader r(*sw, "snr_sweep");
    r.read("start_db", cfg.snr_sweep.start_db);
    r.read("stop_db", cfg.snr_sweep.stop_db);
    r.read("step_db", cfg.snr_sweep.step_db);
    r.finish();
  }

  if (const json* list = root.child("schemes")) {
    if (!list->is_array()) throw ConfigError("schemes: expected an array");
    cfg.schemes.clear();
    for (const auto& s : *list) {
      if (!s.is_string()) throw ConfigError("schemes: entries must be strings");
      try {
        cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("schemes: ") + e.what());
      }
    }
  }

  std::string preset = preset_name(cfg.preset);
  root.read("preset", preset);
  cfg.preset = preset_override ? *preset_override : parse_preset(preset);
  cfg.frame = FrameConfig::for_preset(cfg.preset);
  if (const json* fr = root.child("frame")) {
    detail::ObjectReader r(*fr, "frame");
    r.read("fft_size", cfg.frame.fft_size);
    r.read("n_data_subcarriers", cfg.frame.n_data_subcarriers);
    r.read("cp_len", cfg.frame.cp_len);
    r.read("n_data_symbols", cfg.frame.n_data_symbols);
    r.finish();
  }
  if (const json* pb = root.child("packet_bits")) {
    if (!pb->is_number_unsigned()) throw ConfigError("packet_bits: wrong type");
    const auto bits = pb->get<std::size_t>();
    const std::size_t per_symbol = 2 * cfg.frame.n_data_subcarriers;
    if (per_symbol == 0 || bits == 0 || bits % per_symbol != 0) {
      throw ConfigError("packet_bits: must be a positive multiple of 2*n_data_subcarriers = " +
                        std::to_string(per_symbol));
    }
    cfg.frame.n_data_symbols = bits / per_symbol;
  }

  root.read("frames_per_point", cfg.frames_per_point);
  root.read("min_bits_per_point", cfg.min_bits_per_point);
  root.read("master_seed", cfg.master_seed);
  root.read("sampling_rate_hz", cfg.sampling_rate_hz);
  root.read("genie_csi", cfg.genie_csi);
  std::string likelihood = "exact";
  root.read("likelihood", likelihood);
  if (likelihood == "exact") {
    cfg.likelihood = Likelihood::exact;
  } else if (likelihood == "max-log") {
    cfg.likelihood = Likelihood::max_log;
  } else {
    throw ConfigError("likelihood: expected exact or max-log");
  }
  root.read("downlink_estimation", cfg.downlink_estimation);
  if (const json* phi = root.child("phase_offset_rad"); phi && !phi->is_null()) {
    if (!phi->is_number()) throw ConfigError("phase_offset_rad: wrong type");
    cfg.phase_offset_rad = phi->get<double>();
  }
  root.read("ambient_dc", cfg.ambient_dc);
  if (const json* roots = root.child("pilot_roots")) {
    if (!roots->is_array() || roots->size() != 2) {
      throw ConfigError("pilot_roots: expected an array of two integers");
    }
    for (const auto& v : *roots) {
      if (!v.is_number_unsigned()) throw ConfigError("pilot_roots: expected non-negative integers");
    }
    try {
      cfg.pilot_root_a = (*roots)[0].get<std::size_t>();
      cfg.pilot_root_b = (*roots)[1].get<std::size_t>();
    } catch (const json::exception&) {
      throw ConfigError("pilot_roots: wrong type");
    }
  }

  if (const json* links = root.child("links")) {
    detail::ObjectReader r(*links, "links");
    auto geom = [&](const char* key, GeometryConfig& g) {
      if (const json* obj = r.child(key)) g = detail::read_geometry(*obj, r.field(key), g);
    };
    geom("a_to_relay", cfg.links.a_to_relay);
    geom("b_to_relay", cfg.links.b_to_relay);
    geom("relay_to_a", cfg.links.relay_to_a);
    geom("relay_to_b", cfg.links.relay_to_b);
    r.finish();
  }
  root.finish();
  validate(cfg);
  return cfg;
}

inline ScenarioConfig parse_config_text(const std::string& text,
                                        std::optional<FramePreset> preset_override = std::nullopt) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  return parse_config(doc, preset_override);
}

inline ScenarioConfig load_config(const std::filesystem::path& path,
                                  std::optional<FramePreset> preset_override = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), preset_override);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Fully resolved document; parse_config(to_json(c)) == c.
inline json to_json(const ScenarioConfig& cfg) {
  json schemes = json::array();
  for (auto s : cfg.schemes) schemes.push_back(std::string(scheme_name(s)));
  json doc{
      {"name", cfg.name},
      {"snr_sweep",
       {{"start_db", cfg.snr_sweep.start_db},
        {"stop_db", cfg.snr_sweep.stop_db},
        {"step_db", cfg.snr_sweep.step_db}}},
      {"schemes", schemes},
      {"preset", preset_name(cfg.preset)},
      {"frame",
       {{"fft_size", cfg.frame.fft_size},
        {"n_data_subcarriers", cfg.frame.n_data_subcarriers},
        {"cp_len", cfg.frame.cp_len},
        {"n_data_symbols", cfg.frame.n_data_symbols}}},
      {"frames_per_point", cfg.frames_per_point},
      {"min_bits_per_point", cfg.min_bits_per_point},
      {"master_seed", cfg.master_seed},
      {"sampling_rate_hz", cfg.sampling_rate_hz},
      {"genie_csi", cfg.genie_csi},
      {"likelihood", cfg.likelihood == Likelihood::exact ? "exact" : "max-log"},
      {"downlink_estimation", cfg.downlink_estimation},
      {"phase_offset_rad", cfg.phase_offset_rad ? json(*cfg.phase_offset_rad) : json(nullptr)},
      {"ambient_dc", cfg.ambient_dc},
      {"pilot_roots", {cfg.pilot_root_a, cfg.pilot_root_b}},
      {"links",
       {{"a_to_relay", detail::geometry_to_json(cfg.links.a_to_relay)},
        {"b_to_relay", detail::geometry_to_json(cfg.links.b_to_relay)},
        {"relay_to_a", detail::geometry_to_json(cfg.links.relay_to_a)},
        {"relay_to_b", detail::geometry_to_json(cfg.links.relay_to_b)}}},
  };
  return doc;
}

}  // namespace pncvlc
