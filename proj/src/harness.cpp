#include "hlwnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "hlwnet/rng.hpp"

namespace hlwnet {

Method method_from_string(const std::string& s) {
  if (s == "sss") return Method::Sss;
  if (s == "gt") return Method::Gt;
  if (s == "fl") return Method::Fl;
  if (s == "flopt") return Method::FlOpt;
  if (s == "oracle") return Method::Oracle;
  if (s == "tcnn") return Method::Tcnn;
  throw std::invalid_argument("unknown method: " + s);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Sss: return "sss";
    case Method::Gt: return "gt";
    case Method::Fl: return "fl";
    case Method::FlOpt: return "flopt";
    case Method::Oracle: return "oracle";
    case Method::Tcnn: return "tcnn";
  }
  return "?";
}

MethodRun run_method(Method m, const Snapshot& snap, const FuzzyRuleTable& table,
                     std::uint64_t seed, TcnnModel* model,
                     const NormalizationSpec* norm) {
  switch (m) {
    case Method::Sss:
      return {sss_assign(snap.snr), 0};
    case Method::Gt: {
      GtResult r = gt_assign(snap, GtConfig{}, seed);
      return {std::move(r.chi), r.sweeps};
    }
    case Method::Fl:
      return {fl_assign(snap, table), 0};
    case Method::FlOpt:
      return {flopt_assign(snap, table), 0};
    case Method::Oracle:
      return {exhaustive_oracle(snap), 0};
    case Method::Tcnn: {
      if (!model || !norm)
        throw std::invalid_argument(
            "tcnn method requires a checkpoint (pass --checkpoint)");
      return {predict_assignment(*model, *norm, snr_to_db(snap.snr),
                                 snap.requirements()),
              0};
    }
  }
  throw std::logic_error("run_method: unreachable");
}

namespace {

Snapshot snapshot_for(const ExperimentPlan& plan, double value, std::uint64_t seed,
                      SimConfig& sim_out) {
  SimConfig sim = plan.sim;
  switch (plan.sweep) {
    case SweepVar::Users:
      sim_out = sim;
      return build_snapshot_uniform(sim, static_cast<int>(value), seed);
    case SweepVar::MeanRate:
      // value is the mean requirement in Mbps; shape k is kept.
      sim.rates.scale_bps = value * 1e6 / sim.rates.shape;
      sim_out = sim;
      return build_snapshot_uniform(sim, plan.fixed_users, seed);
    case SweepVar::Clusters: {
      sim_out = sim;
      const int nc = static_cast<int>(value);
      if (nc <= 0) {
        return build_snapshot_uniform(sim, plan.users_per_cluster, seed);
      }
      ClusterSpec spec;
      spec.num_clusters = nc;
      spec.users_per_cluster = plan.users_per_cluster;
      return build_snapshot_clustered(sim, spec, seed);
    }
  }
  throw std::logic_error("snapshot_for: unreachable");
}

struct TcnnContext {
  TcnnModel model;
  NormalizationSpec norm;
};

std::optional<TcnnContext> load_tcnn_if_needed(const ExperimentPlan& plan) {
  const bool needed = std::any_of(plan.methods.begin(), plan.methods.end(),
                                  [](Method m) { return m == Method::Tcnn; });
  if (!needed) return std::nullopt;
  if (plan.checkpoint_path.empty())
    throw std::invalid_argument("tcnn method requires --checkpoint <path>");
  Checkpoint ck = load_checkpoint(plan.checkpoint_path);
  return TcnnContext{std::move(ck.model), ck.norm};
}

}  // namespace

std::vector<RunRecord> run_sweep(const ExperimentPlan& plan, bool parallel) {
  if (plan.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  if (plan.sweep_values.empty()) throw std::invalid_argument("run_sweep: no sweep values");
  const auto tcnn = load_tcnn_if_needed(plan);

  const std::size_t nv = plan.sweep_values.size();
  const std::size_t nt = static_cast<std::size_t>(plan.trials);
  const std::size_t total = plan.methods.size() * nv * nt;
  std::vector<RunRecord> records(total);

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
    const std::size_t i = static_cast<std::size_t>(idx);
    const std::size_t mi = i / (nv * nt);
    const std::size_t vi = (i / nt) % nv;
    const std::size_t ti = i % nt;
    const Method method = plan.methods[mi];
    const double value = plan.sweep_values[vi];
    // Trial seeds depend only on (value, trial) so methods are paired.
    const std::uint64_t seed =
        derive_seed(plan.master_seed, vi * 1000003ULL + ti);

    SimConfig sim;
    const Snapshot snap = snapshot_for(plan, value, seed, sim);
    const FuzzyRuleTable table(sim.rates.mean_bps() / 1e6);

    // TCNN model keeps per-forward caches; give each trial its own copy.
    TcnnModel local_model;
    TcnnModel* model_ptr = nullptr;
    const NormalizationSpec* norm_ptr = nullptr;
    if (tcnn && method == Method::Tcnn) {
      local_model = tcnn->model;
      model_ptr = &local_model;
      norm_ptr = &tcnn->norm;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const MethodRun run = run_method(method, snap, table, seed, model_ptr, norm_ptr);
    const auto t1 = std::chrono::steady_clock::now();

    const auto req = snap.requirements();
    const MetricsReport rep = evaluate(run.chi, snap.capacity, req, plan.mode);

    RunRecord& r = records[i];
    r.method = method;
    r.sweep_value = value;
    r.trial_seed = seed;
    r.throughput_bps = rep.throughput_bps;
    r.served_demand_bps = rep.served_demand_bps;
    r.jain = rep.jain;
    r.objective = rep.objective;
    r.runtime_ns = std::max<long long>(
        1, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    r.iterations = run.iterations;
    if (method == Method::Tcnn) {
      const Matrix label_chi = flopt_assign(snap, table);
      r.accuracy = accuracy(run.chi, label_chi);
      r.gap = performance_gap(run.chi, label_chi, snap.capacity, req, plan.mode);
    }
  }
  return records;
}

std::vector<ClusterStressRow> run_cluster_stress(const ExperimentPlan& plan,
                                                 bool parallel) {
  ExperimentPlan p = plan;
  p.sweep = SweepVar::Clusters;
  const auto records = run_sweep(p, parallel);

  // Uniform baseline: same user count as one cluster batch, cluster value 0.
  ExperimentPlan base = p;
  base.sweep_values = {0.0};
  const auto base_records = run_sweep(base, parallel);

  std::map<Method, double> base_mean;
  std::map<Method, int> base_n;
  for (const RunRecord& r : base_records) {
    base_mean[r.method] += r.throughput_bps;
    base_n[r.method] += 1;
  }
  for (auto& [m, v] : base_mean) v /= base_n[m];

  std::vector<ClusterStressRow> rows;
  for (Method m : p.methods) {
    for (double v : p.sweep_values) {
      double sum = 0.0;
      int n = 0;
      for (const RunRecord& r : records)
        if (r.method == m && r.sweep_value == v) {
          sum += r.throughput_bps;
          ++n;
        }
      ClusterStressRow row;
      row.method = m;
      row.clusters = v;
      row.clustered_mean_bps = sum / n;
      row.uniform_mean_bps = base_mean[m];
      row.relative_loss =
          std::max(0.0, (row.uniform_mean_bps - row.clustered_mean_bps) /
                            row.uniform_mean_bps);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<BenchRow> bench_runtime(const ExperimentPlan& plan, int repetitions) {
  if (repetitions < 30) repetitions = 30;
  const auto tcnn = load_tcnn_if_needed(plan);

  std::vector<BenchRow> rows;
  for (Method m : plan.methods) {
    for (double value : plan.sweep_values) {
      const std::uint64_t seed = derive_seed(plan.master_seed, 77);
      SimConfig sim;
      ExperimentPlan users_plan = plan;
      users_plan.sweep = SweepVar::Users;
      const Snapshot snap = snapshot_for(users_plan, value, seed, sim);
      const FuzzyRuleTable table(sim.rates.mean_bps() / 1e6);

      TcnnModel local_model;
      TcnnModel* model_ptr = nullptr;
      const NormalizationSpec* norm_ptr = nullptr;
      if (tcnn && m == Method::Tcnn) {
        local_model = tcnn->model;
        model_ptr = &local_model;
        norm_ptr = &tcnn->norm;
      }

      for (int w = 0; w < 3; ++w)
        (void)run_method(m, snap, table, seed, model_ptr, norm_ptr);

      std::vector<long long> times(static_cast<std::size_t>(repetitions));
      for (int r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)run_method(m, snap, table, seed, model_ptr, norm_ptr);
        const auto t1 = std::chrono::steady_clock::now();
        times[static_cast<std::size_t>(r)] =
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
      }
      std::sort(times.begin(), times.end());
      BenchRow row;
      row.method = m;
      row.n_users = static_cast<int>(value);
      row.median_ns = times[times.size() / 2];
      row.min_ns = times.front();
      row.max_ns = times.back();
      row.repetitions = repetitions;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<OracleValidationRow> validate_vs_oracle(const ExperimentPlan& plan,
                                                    bool parallel) {
  const std::size_t nt = static_cast<std::size_t>(plan.trials);
  struct Cell {
    double sum = 0.0;
    double mn = 2.0;
  };
  std::vector<std::vector<double>> ratios(plan.methods.size(),
                                          std::vector<double>(nt, 0.0));

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (long long t = 0; t < static_cast<long long>(nt); ++t) {
    const std::uint64_t seed = derive_seed(plan.master_seed, static_cast<std::uint64_t>(t));
    const int n_users = static_cast<int>(
        plan.sweep_values[static_cast<std::size_t>(t) % plan.sweep_values.size()]);
    const Snapshot snap = build_snapshot_uniform(plan.sim, n_users, seed);
    const FuzzyRuleTable table(plan.sim.rates.mean_bps() / 1e6);
    const auto req = snap.requirements();

    const Matrix oracle_chi = exhaustive_oracle(snap, plan.mode);
    const double obj_oracle =
        evaluate(oracle_chi, snap.capacity, req, plan.mode).objective;

    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
      const MethodRun run =
          run_method(plan.methods[mi], snap, table, seed, nullptr, nullptr);
      const double obj = evaluate(run.chi, snap.capacity, req, plan.mode).objective;
      ratios[mi][static_cast<std::size_t>(t)] =
          std::exp((obj - obj_oracle) / static_cast<double>(n_users));
    }
  }

  std::vector<OracleValidationRow> rows;
  for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
    OracleValidationRow row;
    row.method = plan.methods[mi];
    row.instances = static_cast<int>(nt);
    row.min_ratio = 2.0;
    for (double r : ratios[mi]) {
      row.mean_ratio += r;
      row.min_ratio = std::min(row.min_ratio, r);
    }
    row.mean_ratio /= static_cast<double>(nt);
    rows.push_back(row);
  }
  return rows;
}

// -------------------------------------------------------------------- CSV

namespace {
std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}
}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path) {
  auto os = open_out(path);
  os << "method,sweep_value,trial_seed,throughput_bps,served_demand_bps,jain,"
        "objective,runtime_ns,iterations,accuracy,gap\n";
  os.precision(12);
  for (const RunRecord& r : records) {
    os << method_name(r.method) << ',' << r.sweep_value << ',' << r.trial_seed << ','
       << r.throughput_bps << ',' << r.served_demand_bps << ',' << r.jain << ','
       << r.objective << ',' << r.runtime_ns << ',' << r.iterations << ','
       << r.accuracy << ',' << r.gap << '\n';
  }
}

void write_summary_csv(const std::vector<RunRecord>& records, const std::string& path) {
  struct Agg {
    int n = 0;
    double sum_tp = 0.0, sumsq_tp = 0.0, sum_jain = 0.0, sum_obj = 0.0;
  };
  std::map<std::pair<std::string, double>, Agg> agg;
  for (const RunRecord& r : records) {
    Agg& a = agg[{method_name(r.method), r.sweep_value}];
    ++a.n;
    a.sum_tp += r.throughput_bps;
    a.sumsq_tp += r.throughput_bps * r.throughput_bps;
    a.sum_jain += r.jain;
    a.sum_obj += r.objective;
  }
  auto os = open_out(path);
  os << "method,sweep_value,trials,mean_throughput_bps,std_throughput_bps,"
        "mean_jain,mean_objective\n";
  os.precision(12);
  for (const auto& [key, a] : agg) {
    const double mean = a.sum_tp / a.n;
    const double var = std::max(0.0, a.sumsq_tp / a.n - mean * mean);
    os << key.first << ',' << key.second << ',' << a.n << ',' << mean << ','
       << std::sqrt(var) << ',' << a.sum_jain / a.n << ',' << a.sum_obj / a.n << '\n';
  }
}

void write_cluster_csv(const std::vector<ClusterStressRow>& rows, const std::string& path) {
  auto os = open_out(path);
  os << "method,clusters,clustered_mean_bps,uniform_mean_bps,relative_loss\n";
  os.precision(12);
  for (const auto& r : rows)
    os << method_name(r.method) << ',' << r.clusters << ',' << r.clustered_mean_bps
       << ',' << r.uniform_mean_bps << ',' << r.relative_loss << '\n';
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  auto os = open_out(path);
  os << "method,n_users,median_ns,min_ns,max_ns,repetitions\n";
  for (const auto& r : rows)
    os << method_name(r.method) << ',' << r.n_users << ',' << r.median_ns << ','
       << r.min_ns << ',' << r.max_ns << ',' << r.repetitions << '\n';
}

void write_manifest(const ExperimentPlan& plan, const std::string& path) {
  auto os = open_out(path);
  os << "master_seed=" << plan.master_seed << '\n';
  os << "trials=" << plan.trials << '\n';
  os << "sweep="
     << (plan.sweep == SweepVar::Users
             ? "users"
             : plan.sweep == SweepVar::MeanRate ? "mean_rate" : "clusters")
     << '\n';
  os << "sweep_values=";
  for (std::size_t i = 0; i < plan.sweep_values.size(); ++i)
    os << (i ? "," : "") << plan.sweep_values[i];
  os << '\n';
  os << "methods=";
  for (std::size_t i = 0; i < plan.methods.size(); ++i)
    os << (i ? "," : "") << method_name(plan.methods[i]);
  os << '\n';
  os << "allocation_mode="
     << (plan.mode == AllocationMode::EqualShare ? "equal_share" : "satisfaction_capped")
     << '\n';
  os << "room_side_m=" << plan.sim.room.side_length << '\n';
  os << "ceiling_height_m=" << plan.sim.room.ceiling_height << '\n';
  os << "lifi_grid=" << plan.sim.room.lifi_grid << '\n';
  os << "reuse_factor=" << plan.sim.room.reuse_factor << '\n';
  os << "rate_shape_k=" << plan.sim.rates.shape << '\n';
  os << "rate_scale_bps=" << plan.sim.rates.scale_bps << '\n';
  os << "lifi_power_w=" << plan.sim.lifi.optical_power_w << '\n';
  os << "wifi_tx_dbm=" << plan.sim.wifi.tx_power_dbm << '\n';
  os << "wifi_breakpoint_m=" << plan.sim.wifi.breakpoint_m << '\n';
  if (!plan.checkpoint_path.empty())
    os << "checkpoint=" << plan.checkpoint_path << '\n';
}

}  // namespace hlwnet
