#pragma once

// Seeded Monte-Carlo sweep over (scheme, SNR) points with deterministic
// parallel trial execution, CSV emission and the run metadata sidecar.

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pncvlc/errors.hpp"
#include "pncvlc/exchange.hpp"
#include "pncvlc/metrics.hpp"
#include "pncvlc/rng.hpp"
#include "pncvlc/scenario.hpp"

namespace pncvlc {

inline constexpr const char* kArtifactVersion = "0.1.0";

inline constexpr const char* kCsvHeader =
    "scenario,scheme,snr_db,ber,throughput_bps_hz,throughput_mbps,capacity_bps_hz,"
    "energy_per_bit,n_bits,seed";

/// Trial stream: derived only from (seed, scheme, snr index, trial index).
inline Engine trial_stream(std::uint64_t seed, Scheme scheme, std::size_t snr_index,
                           std::uint64_t trial_index) {
  return make_stream(seed, static_cast<std::uint64_t>(scheme), snr_index, trial_index);
}

/// One full exchange at the given sweep point, reproducible in isolation.
inline TrialTally run_trial(const ScenarioConfig& cfg, Scheme scheme, std::size_t snr_index,
                            std::uint64_t trial_index) {
  const auto points = cfg.snr_sweep.points();
  if (snr_index >= points.size()) throw PreconditionError("snr index outside the sweep");
  auto rng = trial_stream(cfg.master_seed, scheme, snr_index, trial_index);
  try {
    return run_exchange(cfg, scheme, calibrate_noise(points[snr_index], cfg.ambient_dc), rng);
  } catch (const Error& e) {
    char where[96];
    std::snprintf(where, sizeof where, " [scheme=%s snr_db=%g trial=%" PRIu64 "]",
                  std::string(scheme_name(scheme)).c_str(), points[snr_index], trial_index);
    throw Error(e.category(), e.what() + std::string(where));
  }
}

/// Fixed work per point: at least frames_per_point exchanges and enough
/// exchanges to compare min_bits_per_point end-to-end bits.
inline std::uint64_t trials_per_point(const ScenarioConfig& cfg) {
  const std::uint64_t bits_per_trial = 2 * cfg.packet_bits();
  const std::uint64_t for_bits = (cfg.min_bits_per_point + bits_per_trial - 1) / bits_per_trial;
  return std::max<std::uint64_t>(cfg.frames_per_point, for_bits);
}

/// One report per (scheme, SNR point). Trials run on `workers` threads; the
/// result does not depend on the worker count.
inline std::vector<MetricsReport> run_sweep(const ScenarioConfig& cfg, unsigned workers = 1) {
  validate(cfg);
  const auto points = cfg.snr_sweep.points();
  const std::uint64_t trials = trials_per_point(cfg);
  const std::size_t n_points = cfg.schemes.size() * points.size();
  const std::uint64_t n_jobs = n_points * trials;

  std::vector<TrialTally> results(n_jobs);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::uint64_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const std::size_t point = job / trials;
      const std::uint64_t trial = job % trials;
      try {
        results[job] = run_trial(cfg, cfg.schemes[point / points.size()], point % points.size(), trial);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_jobs);
        return;
      }
    }
  };

  workers = std::max(1U, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<MetricsReport> reports;
  reports.reserve(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    TrialTally total;
    for (std::uint64_t t = 0; t < trials; ++t) total += results[p * trials + t];
    reports.push_back(make_report(total, cfg.schemes[p / points.size()], points[p % points.size()], cfg));
  }
  return reports;
}

namespace detail {
inline std::string fmt6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace detail

/// Header plus one row per report, sorted by (scheme name, snr_db), LF endings.
inline std::string format_csv(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw PreconditionError("emit_csv: no reports to write");
  std::vector<const MetricsReport*> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const MetricsReport* a, const MetricsReport* b) {
    const auto na = scheme_name(a->scheme);
    const auto nb = scheme_name(b->scheme);
    if (na != nb) return na < nb;
    return a->snr_db < b->snr_db;
  });
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto* r : rows) {
    out += r->scenario;
    out += ',';
    out += scheme_name(r->scheme);
    for (double v : {r->snr_db, r->ber, r->throughput_bps_hz, r->throughput_mbps,
                     r->capacity_bps_hz, r->energy_per_bit}) {
      out += ',';
      out += detail::fmt6(v);
    }
    out += ',' + std::to_string(r->n_bits) + ',' + std::to_string(r->seed) + '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void emit_csv(std::span<const MetricsReport> reports, const std::filesystem::path& path) {
  write_text(path, format_csv(reports));
}

/// FNV-1a 64 of the canonical resolved config document.
inline std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(cfg).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline json run_metadata(const ScenarioConfig& cfg) {
  return json{{"config_hash", config_hash(cfg)},
              {"config_hash_algorithm", "fnv1a64(canonical config json)"},
              {"master_seed", cfg.master_seed},
              {"generator", std::string(kGeneratorName)},
              {"trials_per_point", trials_per_point(cfg)},
              {"artifact_version", kArtifactVersion},
              {"config", to_json(cfg)}};
}

/// Sidecar next to the CSV: <csv>.meta.json
inline std::filesystem::path meta_path_for(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta.json");
}

inline void write_metadata(const ScenarioConfig& cfg, const std::filesystem::path& csv) {
  write_text(meta_path_for(csv), run_metadata(cfg).dump(2) + "\n");
}

}  // namespace pncvlc
