#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hlwnet {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

enum class ApKind { WiFi, LiFi };

struct ApDescriptor {
  int id = 0;
  ApKind kind = ApKind::WiFi;
  Vec3 position;
  double bandwidth_hz = 0.0;
  // Watts (optical) for LiFi, dBm for WiFi.
  double tx_power = 0.0;
  // LiFi frequency-reuse sub-band index; -1 for WiFi.
  int subband = -1;
};

struct UserDescriptor {
  int id = 0;
  Vec3 position;  // z is always 0, users sit on the ground
  double required_rate_bps = 0.0;
};

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// One network realization: APs, users, and the per-link SNR/capacity tables.
struct Snapshot {
  std::vector<ApDescriptor> aps;
  std::vector<UserDescriptor> users;
  Matrix snr;       // linear scale, aps.size() x users.size()
  Matrix capacity;  // bits/s, same shape

  std::size_t n_aps() const { return aps.size(); }
  std::size_t n_users() const { return users.size(); }

  std::vector<double> requirements() const {
    std::vector<double> r(users.size());
    for (std::size_t j = 0; j < users.size(); ++j) r[j] = users[j].required_rate_bps;
    return r;
  }
};

// AP-user connection matrix plus TDMA time shares.
struct Assignment {
  Matrix chi;  // binary, n_aps x n_users; each user column sums to 1
  Matrix rho;  // time shares in [0,1], zero wherever chi is zero
};

inline Matrix chi_from_labels(const std::vector<int>& ap_of_user, std::size_t n_aps) {
  Matrix chi(n_aps, ap_of_user.size(), 0.0);
  for (std::size_t j = 0; j < ap_of_user.size(); ++j) {
    const int i = ap_of_user[j];
    if (i < 0 || static_cast<std::size_t>(i) >= n_aps)
      throw std::invalid_argument("chi_from_labels: AP index out of range");
    chi(static_cast<std::size_t>(i), j) = 1.0;
  }
  return chi;
}

inline std::vector<int> labels_from_chi(const Matrix& chi) {
  std::vector<int> out(chi.cols(), -1);
  for (std::size_t j = 0; j < chi.cols(); ++j) {
    for (std::size_t i = 0; i < chi.rows(); ++i) {
      if (chi(i, j) != 0.0) {
        if (out[j] != -1) throw std::invalid_argument("labels_from_chi: user on two APs");
        out[j] = static_cast<int>(i);
      }
    }
    if (out[j] == -1) throw std::invalid_argument("labels_from_chi: unassigned user");
  }
  return out;
}

}  // namespace hlwnet
