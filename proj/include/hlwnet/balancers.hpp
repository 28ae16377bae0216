#pragma once

#include <cstdint>

#include "hlwnet/allocation.hpp"
#include "hlwnet/fuzzy.hpp"
#include "hlwnet/types.hpp"

namespace hlwnet {

// Signal-strength strategy: per-user argmax over the SNR column, ties to
// the lowest AP index.
Matrix sss_assign(const Matrix& snr);

struct GtConfig {
  int max_iterations = 1000;  // best-response sweeps
  enum class Payoff { Satisfaction, LogSatisfaction } payoff = Payoff::Satisfaction;
};

struct GtResult {
  Matrix chi;
  int sweeps = 0;
  bool converged = false;
};

// Best-response dynamics from the SSS start, random player order per
// sweep; stops at a Nash point (no improving unilateral move in a full
// sweep) or at the sweep cap.
GtResult gt_assign(const Snapshot& snap, const GtConfig& cfg, std::uint64_t rng_seed);

// Payoff of user j if it sat on AP i, others fixed, equal-share TDMA.
double gt_payoff(const Snapshot& snap, const std::vector<int>& ap_of_user,
                 std::size_t j, std::size_t i, GtConfig::Payoff payoff);

// Two-stage fuzzy method: stage 1 admits users to WiFi in descending
// selection score while the score stays above the threshold, stage 2 is
// SSS within LiFi.
Matrix fl_assign(const Snapshot& snap, const FuzzyRuleTable& table,
                 double threshold = 0.5);

// Greedy mix of per-step satisfaction maximization and fuzzy scoring;
// the dataset label oracle.
Matrix flopt_assign(const Snapshot& snap, const FuzzyRuleTable& table);

// Brute force over all N_a^N_u assignments, guarded by size; maximizes
// the log-satisfaction objective under the given allocation mode.
Matrix exhaustive_oracle(const Snapshot& snap,
                         AllocationMode mode = AllocationMode::EqualShare);

// Fuzzy crisp inputs for user j given the current partial assignment
// (-1 = unassigned).
FuzzyInputs fuzzy_inputs_for_user(const Snapshot& snap,
                                  const std::vector<int>& ap_of_user, std::size_t j);

// Demand-load availability of AP i: max(0, 1 - sum of R/C over its users).
double ap_availability(const Snapshot& snap, const std::vector<int>& ap_of_user,
                       std::size_t i);

std::size_t strongest_lifi_ap(const Snapshot& snap, std::size_t j);

}  // namespace hlwnet
