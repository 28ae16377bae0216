#include "hlwnet/scenario.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "hlwnet/rng.hpp"

namespace hlwnet {

void RoomConfig::validate() const {
  if (side_length <= 0.0) throw std::invalid_argument("RoomConfig: side_length must be > 0");
  if (ceiling_height <= 0.0) throw std::invalid_argument("RoomConfig: ceiling_height must be > 0");
  if (lifi_grid != 2 && lifi_grid != 3) throw std::invalid_argument("RoomConfig: lifi_grid must be 2 or 3");
  if (reuse_factor < 1) throw std::invalid_argument("RoomConfig: reuse_factor must be >= 1");
}

void ClusterSpec::validate() const {
  if (num_clusters < 1) throw std::invalid_argument("ClusterSpec: num_clusters must be >= 1");
  if (users_per_cluster < 1) throw std::invalid_argument("ClusterSpec: users_per_cluster must be >= 1");
  if (cov_xx <= 0.0 || cov_yy <= 0.0 || cov_xx * cov_yy - cov_xy * cov_xy <= 0.0)
    throw std::invalid_argument("ClusterSpec: covariance must be symmetric positive-definite");
}

void RateDistribution::validate() const {
  if (shape <= 0.0 || scale_bps <= 0.0)
    throw std::invalid_argument("RateDistribution: shape and scale must be > 0");
}

std::vector<ApDescriptor> place_aps(const RoomConfig& cfg, const ApPowerDefaults& pw) {
  cfg.validate();
  std::vector<ApDescriptor> aps;
  const int g = cfg.lifi_grid;
  aps.reserve(static_cast<std::size_t>(g) * g + 1);

  ApDescriptor wifi;
  wifi.id = 0;
  wifi.kind = ApKind::WiFi;
  wifi.position = {cfg.side_length / 2.0, cfg.side_length / 2.0, 0.0};
  wifi.bandwidth_hz = pw.wifi_bandwidth_hz;
  wifi.tx_power = pw.wifi_tx_power_dbm;
  aps.push_back(wifi);

  // Sub-band pattern (row + q*col) mod f keeps grid neighbours on
  // different sub-bands; q=2 yields the 2x2 Latin square for reuse 4.
  const int f = cfg.reuse_factor;
  const int q = (f == 2) ? 1 : 2;
  const double cell = cfg.side_length / g;
  int id = 1;
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      ApDescriptor ap;
      ap.id = id++;
      ap.kind = ApKind::LiFi;
      ap.position = {(col + 0.5) * cell, (row + 0.5) * cell, cfg.ceiling_height};
      ap.bandwidth_hz = pw.lifi_bandwidth_hz;
      ap.tx_power = pw.lifi_optical_power_w;
      ap.subband = (f == 1) ? 0 : (row + q * col) % f;
      aps.push_back(ap);
    }
  }
  return aps;
}

std::vector<UserDescriptor> sample_users_uniform(const RoomConfig& cfg, int n,
                                                 std::uint64_t rng_seed) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("sample_users_uniform: empty scenario (n must be >= 1)");
  Rng rng(rng_seed);
  std::uniform_real_distribution<double> u(0.0, cfg.side_length);
  std::vector<UserDescriptor> users(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    users[j].id = j;
    const double x = u(rng);
    const double y = u(rng);
    users[j].position = {x, y, 0.0};
  }
  return users;
}

std::vector<UserDescriptor> sample_users_clustered(const RoomConfig& cfg,
                                                   const ClusterSpec& spec,
                                                   std::uint64_t rng_seed) {
  cfg.validate();
  spec.validate();
  Rng rng(rng_seed);
  std::uniform_real_distribution<double> u(0.0, cfg.side_length);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Cholesky factor of the 2x2 covariance.
  const double l11 = std::sqrt(spec.cov_xx);
  const double l21 = spec.cov_xy / l11;
  const double l22 = std::sqrt(spec.cov_yy - l21 * l21);

  std::vector<UserDescriptor> users;
  users.reserve(static_cast<std::size_t>(spec.num_clusters) * spec.users_per_cluster);
  int id = 0;
  for (int c = 0; c < spec.num_clusters; ++c) {
    const double cx = u(rng);
    const double cy = u(rng);
    for (int k = 0; k < spec.users_per_cluster; ++k) {
      double x, y;
      do {  // rejection: redraw samples outside the room footprint
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        x = cx + l11 * z1;
        y = cy + l21 * z1 + l22 * z2;
      } while (x < 0.0 || x > cfg.side_length || y < 0.0 || y > cfg.side_length);
      UserDescriptor usr;
      usr.id = id++;
      usr.position = {x, y, 0.0};
      users.push_back(usr);
    }
  }
  return users;
}

std::vector<double> sample_requirements(const RateDistribution& dist, int n,
                                        std::uint64_t rng_seed) {
  dist.validate();
  if (n < 1) throw std::invalid_argument("sample_requirements: n must be >= 1");
  Rng rng(rng_seed);
  std::gamma_distribution<double> gamma(dist.shape, dist.scale_bps);
  std::vector<double> rates(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    rates[j] = std::clamp(gamma(rng), kRateMinBps, kRateMaxBps);
  return rates;
}

}  // namespace hlwnet
