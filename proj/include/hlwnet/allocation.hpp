#pragma once

#include <vector>

#include "hlwnet/types.hpp"

namespace hlwnet {

enum class AllocationMode { EqualShare, SatisfactionCapped };

struct MetricsReport {
  double throughput_bps = 0.0;
  double served_demand_bps = 0.0;  // per-link served rate capped at R_j
  std::vector<double> satisfaction;
  double jain = 0.0;
  double objective = 0.0;  // sum of log S_j
};

// Time shares for a fixed connection matrix. EqualShare follows the
// approximate KKT solution rho = 1/sum(chi); SatisfactionCapped serves
// rho = R/C per AP when the total demand fits, else falls back to equal share.
Matrix allocate_time(const Matrix& chi, const Matrix& capacities,
                     const std::vector<double>& requirements, AllocationMode mode);

double throughput(const Assignment& a, const Matrix& capacities);

std::vector<double> satisfaction(const Assignment& a, const Matrix& capacities,
                                 const std::vector<double>& requirements);

double served_demand(const Assignment& a, const Matrix& capacities,
                     const std::vector<double>& requirements);

double jain(const std::vector<double>& satisfactions);

double log_satisfaction_objective(const std::vector<double>& satisfactions);

double performance_gap(const Matrix& predicted_chi, const Matrix& label_chi,
                       const Matrix& capacities, const std::vector<double>& requirements,
                       AllocationMode mode);

double accuracy(const Matrix& predicted_chi, const Matrix& label_chi);

MetricsReport evaluate(const Matrix& chi, const Matrix& capacities,
                       const std::vector<double>& requirements, AllocationMode mode);

void check_column_valid(const Matrix& chi);

}  // namespace hlwnet
