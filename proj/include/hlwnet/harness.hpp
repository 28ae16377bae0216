#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlwnet/allocation.hpp"
#include "hlwnet/balancers.hpp"
#include "hlwnet/simulation.hpp"
#include "hlwnet/tcnn.hpp"

namespace hlwnet {

enum class Method { Sss, Gt, Fl, FlOpt, Oracle, Tcnn };

Method method_from_string(const std::string& s);
std::string method_name(Method m);

enum class SweepVar { Users, MeanRate, Clusters };

struct ExperimentPlan {
  std::vector<Method> methods = {Method::Sss, Method::FlOpt};
  SimConfig sim;
  SweepVar sweep = SweepVar::Users;
  std::vector<double> sweep_values = {5, 10, 15, 20};
  int trials = 100;
  std::uint64_t master_seed = 1;
  AllocationMode mode = AllocationMode::EqualShare;
  int fixed_users = 20;          // for mean-rate sweeps
  int users_per_cluster = 10;    // for cluster sweeps
  std::string checkpoint_path;   // required when methods include tcnn
};

struct RunRecord {
  Method method = Method::Sss;
  double sweep_value = 0.0;
  std::uint64_t trial_seed = 0;
  double throughput_bps = 0.0;
  double served_demand_bps = 0.0;
  double jain = 0.0;
  double objective = 0.0;
  long long runtime_ns = 0;
  int iterations = 0;        // GT only
  double accuracy = -1.0;    // TCNN only, vs FL-OPT labels
  double gap = -1.0;         // TCNN only
};

// One record per (method, sweep value, trial), canonical order regardless
// of worker completion order; bit-reproducible per trial seed.
std::vector<RunRecord> run_sweep(const ExperimentPlan& plan, bool parallel = true);

struct ClusterStressRow {
  Method method;
  double clusters = 0.0;
  double clustered_mean_bps = 0.0;
  double uniform_mean_bps = 0.0;
  double relative_loss = 0.0;  // (uniform - clustered) / uniform
};

std::vector<ClusterStressRow> run_cluster_stress(const ExperimentPlan& plan,
                                                 bool parallel = true);

struct BenchRow {
  Method method;
  int n_users = 0;
  long long median_ns = 0;
  long long min_ns = 0;
  long long max_ns = 0;
  int repetitions = 0;
};

// Wall-clock of the assignment call alone (TCNN = mapping + forwards),
// median of >= 30 reps after warmup; always single-threaded.
std::vector<BenchRow> bench_runtime(const ExperimentPlan& plan, int repetitions = 30);

struct OracleValidationRow {
  Method method;
  // Per-user geometric-mean satisfaction ratio to the oracle optimum,
  // exp((obj - obj_oracle)/N_u); 1.0 = optimal.
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  int instances = 0;
};

std::vector<OracleValidationRow> validate_vs_oracle(const ExperimentPlan& plan,
                                                    bool parallel = true);

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_summary_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_cluster_csv(const std::vector<ClusterStressRow>& rows, const std::string& path);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);
void write_manifest(const ExperimentPlan& plan, const std::string& path);

// Single-trial assignment dispatch; exposed for tests and the CLI.
struct MethodRun {
  Matrix chi;
  int iterations = 0;
};
MethodRun run_method(Method m, const Snapshot& snap, const FuzzyRuleTable& table,
                     std::uint64_t seed, TcnnModel* model,
                     const NormalizationSpec* norm);

}  // namespace hlwnet
