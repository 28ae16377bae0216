#pragma once

#include <cstdint>
#include <vector>

#include "hlwnet/types.hpp"

namespace hlwnet {

// Lambertian front-end for the optical links.
struct LiFiFrontEnd {
  double half_power_semiangle_deg = 60.0;
  double pd_area_m2 = 1e-4;           // 1 cm^2
  double fov_deg = 90.0;
  double optical_filter_gain = 1.0;
  double concentrator_index = 1.5;
  double responsivity_a_per_w = 0.53;
  double noise_psd_a2_per_hz = 1e-21;
  double bandwidth_hz = 20e6;         // per AP, post-reuse
  double optical_power_w = 3.0;
  double wall_reflectivity = 0.8;
  bool nlos_enabled = false;
  int wall_partition = 40;            // elements per wall axis for NLoS sum

  void validate() const;
};

struct WiFiFrontEnd {
  double tx_power_dbm = 20.0;
  double carrier_freq_hz = 2.4e9;
  double breakpoint_m = 3.0;
  double exponent_before = 2.0;
  double exponent_after = 3.5;
  double noise_psd_dbm_per_hz = -164.0;  // thermal floor plus 10 dB noise figure
  double bandwidth_hz = 20e6;
  double shadowing_sigma_db = 0.0;       // 0 disables shadowing

  void validate() const;
};

// Lambertian LoS gain; zero outside the receiver field of view.
double lifi_los_gain(const ApDescriptor& ap, const UserDescriptor& user,
                     const LiFiFrontEnd& fe);

// One-bounce wall reflection summed over discretized wall elements.
// `room_side`/`room_height` bound the four walls; partition is elements per axis.
double lifi_nlos_gain(const ApDescriptor& ap, const UserDescriptor& user,
                      const LiFiFrontEnd& fe, double room_side, double room_height,
                      int wall_partition);

// Dual-slope log-distance path loss in dB (positive). Optional lognormal
// shadowing drawn from the seed.
double wifi_path_loss_db(const ApDescriptor& ap, const UserDescriptor& user,
                         const WiFiFrontEnd& fe, std::uint64_t rng_seed = 0);

double lifi_snr(double channel_gain, const LiFiFrontEnd& fe);
double wifi_snr(double path_loss_db, const WiFiFrontEnd& fe);

// Link capacity: LiFi uses the tighter (B/2)log2(1+(e/2pi)g) bound,
// WiFi plain Shannon.
double link_capacity(ApKind kind, double bandwidth_hz, double snr_linear);

// Full N_a x N_u linear-SNR matrix. `room_side`/`room_height` are needed
// only when NLoS is enabled.
Matrix build_snr_matrix(const std::vector<ApDescriptor>& aps,
                        const std::vector<UserDescriptor>& users,
                        const LiFiFrontEnd& lifi, const WiFiFrontEnd& wifi,
                        double room_side, double room_height,
                        std::uint64_t rng_seed = 0);

Matrix capacity_matrix(const std::vector<ApDescriptor>& aps, const Matrix& snr);

Matrix snr_to_db(const Matrix& linear);

}  // namespace hlwnet
