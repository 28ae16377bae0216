#include "hlwnet/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hlwnet {

void check_column_valid(const Matrix& chi) {
  for (std::size_t j = 0; j < chi.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < chi.rows(); ++i) {
      const double v = chi(i, j);
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("chi must be binary");
      s += v;
    }
    if (s != 1.0) throw std::invalid_argument("each user must connect to exactly one AP");
  }
}

Matrix allocate_time(const Matrix& chi, const Matrix& capacities,
                     const std::vector<double>& requirements, AllocationMode mode) {
  check_column_valid(chi);
  if (capacities.rows() != chi.rows() || capacities.cols() != chi.cols() ||
      requirements.size() != chi.cols())
    throw std::invalid_argument("allocate_time: shape mismatch");

  Matrix rho(chi.rows(), chi.cols(), 0.0);
  for (std::size_t i = 0; i < chi.rows(); ++i) {
    std::vector<std::size_t> connected;
    for (std::size_t j = 0; j < chi.cols(); ++j)
      if (chi(i, j) != 0.0) connected.push_back(j);
    if (connected.empty()) continue;

    for (std::size_t j : connected)
      if (capacities(i, j) <= 0.0)
        throw std::runtime_error("allocate_time: connected pair with zero capacity");

    bool capped = false;
    if (mode == AllocationMode::SatisfactionCapped) {
      double demand = 0.0;
      for (std::size_t j : connected) demand += requirements[j] / capacities(i, j);
      if (demand <= 1.0) {
        for (std::size_t j : connected) rho(i, j) = requirements[j] / capacities(i, j);
        capped = true;
      }
    }
    if (!capped) {
      const double share = 1.0 / static_cast<double>(connected.size());
      for (std::size_t j : connected) rho(i, j) = share;
    }
  }
  return rho;
}

double throughput(const Assignment& a, const Matrix& capacities) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.chi.rows(); ++i)
    for (std::size_t j = 0; j < a.chi.cols(); ++j)
      g += a.rho(i, j) * a.chi(i, j) * capacities(i, j);
  return g;
}

std::vector<double> satisfaction(const Assignment& a, const Matrix& capacities,
                                 const std::vector<double>& requirements) {
  std::vector<double> s(a.chi.cols(), 0.0);
  for (std::size_t j = 0; j < a.chi.cols(); ++j) {
    if (requirements[j] <= 0.0) throw std::invalid_argument("satisfaction: R_j must be > 0");
    double served = 0.0;
    for (std::size_t i = 0; i < a.chi.rows(); ++i)
      served += a.rho(i, j) * a.chi(i, j) * capacities(i, j);
    s[j] = std::min(served / requirements[j], 1.0);
  }
  return s;
}

double served_demand(const Assignment& a, const Matrix& capacities,
                     const std::vector<double>& requirements) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.chi.cols(); ++j) {
    double served = 0.0;
    for (std::size_t i = 0; i < a.chi.rows(); ++i)
      served += a.rho(i, j) * a.chi(i, j) * capacities(i, j);
    total += std::min(served, requirements[j]);
  }
  return total;
}

double jain(const std::vector<double>& satisfactions) {
  if (satisfactions.empty()) throw std::invalid_argument("jain: empty vector");
  double sum = 0.0, sumsq = 0.0;
  for (double s : satisfactions) {
    sum += s;
    sumsq += s * s;
  }
  if (sumsq == 0.0) throw std::domain_error("jain: undefined for all-zero satisfaction");
  return sum * sum / (static_cast<double>(satisfactions.size()) * sumsq);
}

double log_satisfaction_objective(const std::vector<double>& satisfactions) {
  double obj = 0.0;
  for (double s : satisfactions) obj += std::log(std::max(s, 1e-300));
  return obj;
}

double performance_gap(const Matrix& predicted_chi, const Matrix& label_chi,
                       const Matrix& capacities, const std::vector<double>& requirements,
                       AllocationMode mode) {
  Assignment pred{predicted_chi,
                  allocate_time(predicted_chi, capacities, requirements, mode)};
  Assignment label{label_chi, allocate_time(label_chi, capacities, requirements, mode)};
  const double gp = throughput(pred, capacities);
  const double gl = throughput(label, capacities);
  if (gl == 0.0) throw std::domain_error("performance_gap: label throughput is zero");
  return std::abs(gp - gl) / gl;
}

double accuracy(const Matrix& predicted_chi, const Matrix& label_chi) {
  if (predicted_chi.rows() != label_chi.rows() || predicted_chi.cols() != label_chi.cols())
    throw std::invalid_argument("accuracy: shape mismatch");
  const auto pred = labels_from_chi(predicted_chi);
  const auto label = labels_from_chi(label_chi);
  std::size_t hit = 0;
  for (std::size_t j = 0; j < pred.size(); ++j)
    if (pred[j] == label[j]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

MetricsReport evaluate(const Matrix& chi, const Matrix& capacities,
                       const std::vector<double>& requirements, AllocationMode mode) {
  Assignment a{chi, allocate_time(chi, capacities, requirements, mode)};
  MetricsReport r;
  r.throughput_bps = throughput(a, capacities);
  r.served_demand_bps = served_demand(a, capacities, requirements);
  r.satisfaction = satisfaction(a, capacities, requirements);
  r.jain = jain(r.satisfaction);
  r.objective = log_satisfaction_objective(r.satisfaction);
  return r;
}

}  // namespace hlwnet
