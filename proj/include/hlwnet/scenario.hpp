#pragma once

#include <cstdint>
#include <vector>

#include "hlwnet/types.hpp"

namespace hlwnet {

struct RoomConfig {
  double side_length = 5.0;     // m
  double ceiling_height = 3.0;  // m
  int lifi_grid = 2;            // per axis: 2 -> 4 LiFi APs, 3 -> 9
  int reuse_factor = 4;

  void validate() const;
};

struct ClusterSpec {
  int num_clusters = 5;
  int users_per_cluster = 10;
  // 2x2 covariance, must be symmetric positive-definite
  double cov_xx = 0.25;
  double cov_xy = 0.0;
  double cov_yy = 0.25;

  void validate() const;
};

// Gamma-distributed per-user rate requirement, mean = shape * scale.
struct RateDistribution {
  double shape = 2.0;        // k
  double scale_bps = 50e6;   // theta

  double mean_bps() const { return shape * scale_bps; }
  void validate() const;
};

// Requirement clamp, matches the [1, 1000] Mbps normalization bounds.
constexpr double kRateMinBps = 1e6;
constexpr double kRateMaxBps = 1000e6;

// Default AP front-end figures used when placing APs; the channel module
// carries the full front-end models.
struct ApPowerDefaults {
  double lifi_bandwidth_hz = 20e6;  // post-reuse
  double lifi_optical_power_w = 3.0;
  double wifi_bandwidth_hz = 20e6;
  double wifi_tx_power_dbm = 20.0;
};

// WiFi AP at index 0 on the ground centre; LiFi APs row-major at equal
// sub-square centres on the ceiling.
std::vector<ApDescriptor> place_aps(const RoomConfig& cfg,
                                    const ApPowerDefaults& pw = {});

std::vector<UserDescriptor> sample_users_uniform(const RoomConfig& cfg, int n,
                                                 std::uint64_t rng_seed);

std::vector<UserDescriptor> sample_users_clustered(const RoomConfig& cfg,
                                                   const ClusterSpec& spec,
                                                   std::uint64_t rng_seed);

std::vector<double> sample_requirements(const RateDistribution& dist, int n,
                                        std::uint64_t rng_seed);

}  // namespace hlwnet
