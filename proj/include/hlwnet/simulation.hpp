#pragma once

#include <cstdint>

#include "hlwnet/channel.hpp"
#include "hlwnet/rng.hpp"
#include "hlwnet/scenario.hpp"
#include "hlwnet/types.hpp"

namespace hlwnet {

// Everything needed to realize one snapshot.
struct SimConfig {
  RoomConfig room;
  RateDistribution rates;
  LiFiFrontEnd lifi;
  WiFiFrontEnd wifi;

  ApPowerDefaults power_defaults() const {
    return {lifi.bandwidth_hz, lifi.optical_power_w, wifi.bandwidth_hz,
            wifi.tx_power_dbm};
  }
};

inline Snapshot finish_snapshot(const SimConfig& cfg, std::vector<ApDescriptor> aps,
                                std::vector<UserDescriptor> users,
                                std::uint64_t seed) {
  const auto rates = sample_requirements(cfg.rates, static_cast<int>(users.size()),
                                         derive_seed(seed, 1));
  for (std::size_t j = 0; j < users.size(); ++j)
    users[j].required_rate_bps = rates[j];
  Snapshot snap;
  snap.aps = std::move(aps);
  snap.users = std::move(users);
  snap.snr = build_snr_matrix(snap.aps, snap.users, cfg.lifi, cfg.wifi,
                              cfg.room.side_length, cfg.room.ceiling_height,
                              derive_seed(seed, 2));
  snap.capacity = capacity_matrix(snap.aps, snap.snr);
  return snap;
}

inline Snapshot build_snapshot_uniform(const SimConfig& cfg, int n_users,
                                       std::uint64_t seed) {
  return finish_snapshot(cfg, place_aps(cfg.room, cfg.power_defaults()),
                         sample_users_uniform(cfg.room, n_users, derive_seed(seed, 0)),
                         seed);
}

inline Snapshot build_snapshot_clustered(const SimConfig& cfg, const ClusterSpec& spec,
                                         std::uint64_t seed) {
  return finish_snapshot(cfg, place_aps(cfg.room, cfg.power_defaults()),
                         sample_users_clustered(cfg.room, spec, derive_seed(seed, 0)),
                         seed);
}

}  // namespace hlwnet
