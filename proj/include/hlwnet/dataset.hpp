#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hlwnet/simulation.hpp"
#include "hlwnet/types.hpp"

namespace hlwnet {

// One labeled snapshot: SNRs in dB, raw requirements, FL-OPT AP labels.
struct RawSample {
  Matrix snr_db;                       // n_aps x n_users
  std::vector<double> requirements_bps;
  std::vector<std::uint16_t> labels;   // AP index per user

  bool operator==(const RawSample& o) const = default;
};

struct NormalizationSpec {
  // Global SNR bounds (dB) from the training split.
  double snr_min_db = 0.0;
  double snr_max_db = 1.0;
  // Optional per-kind bounds; row 0 is WiFi by construction.
  bool per_kind = false;
  double wifi_min_db = 0.0, wifi_max_db = 1.0;
  double lifi_min_db = 0.0, lifi_max_db = 1.0;
  // Fixed rate bounds, matching the sampling clamp.
  double rate_min_bps = 1e6;
  double rate_max_bps = 1000e6;
};

struct GenerateConfig {
  std::vector<int> user_counts = {5, 8, 10};
  int batches = 20;
  int batch_size = 64;
  int mapped_users = 10;  // M; every user count must be <= M
  SimConfig sim;
};

struct Dataset {
  std::uint16_t n_aps = 0;
  std::uint16_t mapped_users = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  NormalizationSpec norm;
  std::vector<RawSample> samples;
};

std::uint64_t config_digest(const GenerateConfig& cfg);

// batches * batch_size labeled snapshots, spread equally over the user
// counts; per-sample derived seeds make the parallel and serial paths
// bit-identical.
Dataset generate(const GenerateConfig& cfg, std::uint64_t master_seed,
                 bool parallel = true);
Dataset generate_serial(const GenerateConfig& cfg, std::uint64_t master_seed);

// Norm-spec bounds from a training split.
NormalizationSpec compute_norm_spec(const Dataset& train, bool per_kind = false);

// Linear SNR normalization, clamped to [0,1]; `row` selects the per-kind
// bounds when enabled (row 0 = WiFi). Out-of-range clamps are counted.
double normalize_snr_db(double snr_db, const NormalizationSpec& spec, std::size_t row,
                        std::size_t* clamp_count = nullptr);

// Logarithmic rate normalization onto [0,1].
double normalize_rate_bps(double rate_bps, const NormalizationSpec& spec,
                          std::size_t* clamp_count = nullptr);

void save(const Dataset& ds, const std::string& path);
Dataset load(const std::string& path);

// Disjoint, exhaustive, seed-deterministic split; the train part gets a
// freshly computed NormalizationSpec.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t rng_seed);

}  // namespace hlwnet
