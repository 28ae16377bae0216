#include "hlwnet/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hlwnet/rng.hpp"

namespace hlwnet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;
// Users exactly at the WiFi AP position would put the path-loss model in
// its near field; distances are floored instead.
constexpr double kMinWifiDistance = 0.1;

double deg2rad(double d) { return d * kPi / 180.0; }

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double lambertian_order(const LiFiFrontEnd& fe) {
  return -std::numbers::ln2 / std::log(std::cos(deg2rad(fe.half_power_semiangle_deg)));
}

double concentrator_gain(const LiFiFrontEnd& fe) {
  const double s = std::sin(deg2rad(fe.fov_deg));
  return fe.concentrator_index * fe.concentrator_index / (s * s);
}

}  // namespace

void LiFiFrontEnd::validate() const {
  if (half_power_semiangle_deg <= 0.0 || half_power_semiangle_deg >= 90.0)
    throw std::invalid_argument("LiFiFrontEnd: semiangle must be in (0, 90)");
  if (fov_deg <= 0.0 || fov_deg > 90.0)
    throw std::invalid_argument("LiFiFrontEnd: FOV must be in (0, 90]");
  if (pd_area_m2 <= 0.0 || optical_filter_gain <= 0.0 || responsivity_a_per_w <= 0.0 ||
      noise_psd_a2_per_hz <= 0.0 || bandwidth_hz <= 0.0 || optical_power_w <= 0.0)
    throw std::invalid_argument("LiFiFrontEnd: gains and powers must be > 0");
}

void WiFiFrontEnd::validate() const {
  if (breakpoint_m <= 0.0) throw std::invalid_argument("WiFiFrontEnd: breakpoint must be > 0");
  if (exponent_before < 2.0 || exponent_after < 2.0)
    throw std::invalid_argument("WiFiFrontEnd: path-loss exponents must be >= 2");
}

double lifi_los_gain(const ApDescriptor& ap, const UserDescriptor& user,
                     const LiFiFrontEnd& fe) {
  if (ap.kind != ApKind::LiFi) throw std::invalid_argument("lifi_los_gain: AP is not LiFi");
  const double d = distance(ap.position, user.position);
  if (d <= 0.0) throw std::domain_error("lifi_los_gain: degenerate geometry (d = 0)");

  // AP faces straight down, receiver straight up, so the irradiance and
  // incidence angles coincide.
  const double cos_angle = (ap.position.z - user.position.z) / d;
  if (cos_angle <= 0.0) return 0.0;
  const double psi = std::acos(std::clamp(cos_angle, -1.0, 1.0));
  if (psi > deg2rad(fe.fov_deg)) return 0.0;

  const double m = lambertian_order(fe);
  return (m + 1.0) * fe.pd_area_m2 / (2.0 * kPi * d * d) * std::pow(cos_angle, m) *
         fe.optical_filter_gain * concentrator_gain(fe) * cos_angle;
}

double lifi_nlos_gain(const ApDescriptor& ap, const UserDescriptor& user,
                      const LiFiFrontEnd& fe, double room_side, double room_height,
                      int wall_partition) {
  if (ap.kind != ApKind::LiFi) throw std::invalid_argument("lifi_nlos_gain: AP is not LiFi");
  if (fe.wall_reflectivity <= 0.0) return 0.0;

  const double m = lambertian_order(fe);
  const double fov = deg2rad(fe.fov_deg);
  const double g = concentrator_gain(fe);
  const int p = wall_partition;
  const double du = room_side / p;
  const double dv = room_height / p;
  const double area = du * dv;

  // The four walls of the [0, side]^2 footprint with inward normals.
  struct Wall {
    Vec3 origin;
    Vec3 along;   // unit, horizontal
    Vec3 normal;  // unit, inward
  };
  const Wall walls[4] = {
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
      {{0, room_side, 0}, {1, 0, 0}, {0, -1, 0}},
      {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}},
      {{room_side, 0, 0}, {0, 1, 0}, {-1, 0, 0}},
  };

  double total = 0.0;
  for (const Wall& w : walls) {
    for (int iu = 0; iu < p; ++iu) {
      for (int iv = 0; iv < p; ++iv) {
        const double u = (iu + 0.5) * du;
        const double v = (iv + 0.5) * dv;
        const Vec3 pt = {w.origin.x + w.along.x * u, w.origin.y + w.along.y * u, v};

        const Vec3 to_wall = pt - ap.position;
        const double d1 = norm(to_wall);
        if (d1 <= 0.0) continue;
        const double cos_phi1 = (ap.position.z - pt.z) / d1;  // AP faces down
        const double cos_a1 = -dot(to_wall, w.normal) / d1;
        if (cos_phi1 <= 0.0 || cos_a1 <= 0.0) continue;

        const Vec3 to_user = user.position - pt;
        const double d2 = norm(to_user);
        if (d2 <= 0.0) continue;
        const double cos_a2 = dot(to_user, w.normal) / d2;
        const double cos_psi = (pt.z - user.position.z) / d2;  // receiver faces up
        if (cos_a2 <= 0.0 || cos_psi <= 0.0) continue;
        if (std::acos(std::clamp(cos_psi, -1.0, 1.0)) > fov) continue;

        total += (m + 1.0) * fe.pd_area_m2 * fe.wall_reflectivity /
                 (2.0 * kPi * kPi * d1 * d1 * d2 * d2) * std::pow(cos_phi1, m) *
                 cos_a1 * cos_a2 * cos_psi * fe.optical_filter_gain * g * area;
      }
    }
  }
  return total;
}

double wifi_path_loss_db(const ApDescriptor& ap, const UserDescriptor& user,
                         const WiFiFrontEnd& fe, std::uint64_t rng_seed) {
  if (ap.kind != ApKind::WiFi) throw std::invalid_argument("wifi_path_loss_db: AP is not WiFi");
  const double d = std::max(distance(ap.position, user.position), kMinWifiDistance);
  // Free-space loss at the 1 m reference distance.
  const double l0 = 20.0 * std::log10(4.0 * kPi * fe.carrier_freq_hz / kSpeedOfLight);
  double pl;
  if (d <= fe.breakpoint_m) {
    pl = l0 + 10.0 * fe.exponent_before * std::log10(d);
  } else {
    pl = l0 + 10.0 * fe.exponent_before * std::log10(fe.breakpoint_m) +
         10.0 * fe.exponent_after * std::log10(d / fe.breakpoint_m);
  }
  if (fe.shadowing_sigma_db > 0.0) {
    Rng rng(rng_seed);
    std::normal_distribution<double> sh(0.0, fe.shadowing_sigma_db);
    pl += sh(rng);
  }
  return pl;
}

double lifi_snr(double channel_gain, const LiFiFrontEnd& fe) {
  if (channel_gain < 0.0) throw std::invalid_argument("lifi_snr: gain must be >= 0");
  const double sig = fe.responsivity_a_per_w * fe.optical_power_w * channel_gain;
  return sig * sig / (fe.noise_psd_a2_per_hz * fe.bandwidth_hz);
}

double wifi_snr(double path_loss_db, const WiFiFrontEnd& fe) {
  const double prx_w = dbm_to_watts(fe.tx_power_dbm - path_loss_db);
  const double noise_w = dbm_to_watts(fe.noise_psd_dbm_per_hz) * fe.bandwidth_hz;
  return prx_w / noise_w;
}

double link_capacity(ApKind kind, double bandwidth_hz, double snr_linear) {
  if (snr_linear < 0.0) throw std::invalid_argument("link_capacity: SNR must be >= 0");
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("link_capacity: bandwidth must be > 0");
  if (kind == ApKind::LiFi)
    return bandwidth_hz / 2.0 * std::log2(1.0 + std::numbers::e / (2.0 * kPi) * snr_linear);
  return bandwidth_hz * std::log2(1.0 + snr_linear);
}

Matrix build_snr_matrix(const std::vector<ApDescriptor>& aps,
                        const std::vector<UserDescriptor>& users,
                        const LiFiFrontEnd& lifi, const WiFiFrontEnd& wifi,
                        double room_side, double room_height, std::uint64_t rng_seed) {
  lifi.validate();
  wifi.validate();
  Matrix snr(aps.size(), users.size());
  for (std::size_t i = 0; i < aps.size(); ++i) {
    for (std::size_t j = 0; j < users.size(); ++j) {
      if (aps[i].kind == ApKind::LiFi) {
        double h = lifi_los_gain(aps[i], users[j], lifi);
        if (lifi.nlos_enabled)
          h += lifi_nlos_gain(aps[i], users[j], lifi, room_side, room_height,
                              lifi.wall_partition);
        snr(i, j) = lifi_snr(h, lifi);
      } else {
        const std::uint64_t link_seed = derive_seed(rng_seed, i * users.size() + j);
        snr(i, j) = wifi_snr(wifi_path_loss_db(aps[i], users[j], wifi, link_seed), wifi);
      }
    }
  }
  return snr;
}

Matrix capacity_matrix(const std::vector<ApDescriptor>& aps, const Matrix& snr) {
  Matrix c(snr.rows(), snr.cols());
  for (std::size_t i = 0; i < snr.rows(); ++i)
    for (std::size_t j = 0; j < snr.cols(); ++j)
      c(i, j) = link_capacity(aps[i].kind, aps[i].bandwidth_hz, snr(i, j));
  return c;
}

Matrix snr_to_db(const Matrix& linear) {
  Matrix db(linear.rows(), linear.cols());
  for (std::size_t i = 0; i < linear.rows(); ++i)
    for (std::size_t j = 0; j < linear.cols(); ++j)
      db(i, j) = 10.0 * std::log10(std::max(linear(i, j), 1e-300));
  return db;
}

}  // namespace hlwnet
