// Command-line front end: scenario inspection, dataset pipeline, model
// training/evaluation, and the Monte-Carlo experiment harness.

#include <cstdio>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlwnet/balancers.hpp"
#include "hlwnet/dataset.hpp"
#include "hlwnet/harness.hpp"
#include "hlwnet/simulation.hpp"
#include "hlwnet/tcnn.hpp"

using namespace hlwnet;
using nlohmann::json;

namespace {

struct AppConfig {
  SimConfig sim;
  GenerateConfig gen;
  TrainConfig train;
  double test_fraction = 0.125;
  std::uint64_t split_seed = 9;
  ExperimentPlan plan;
};

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

AppConfig load_config(const std::string& path) {
  AppConfig cfg;
  cfg.train.epochs = 30;
  cfg.train.batch_size = 12;
  cfg.train.all_targets = true;
  cfg.gen.user_counts = {5, 8, 10};
  cfg.gen.batches = 50;
  cfg.gen.batch_size = 80;
  cfg.gen.mapped_users = 10;
  if (path.empty()) return cfg;

  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("--config", "cannot open " + path);
  json j = json::parse(is);

  if (j.contains("room")) {
    const auto& r = j["room"];
    maybe(r, "side_length", cfg.sim.room.side_length);
    maybe(r, "ceiling_height", cfg.sim.room.ceiling_height);
    maybe(r, "lifi_grid", cfg.sim.room.lifi_grid);
    maybe(r, "reuse_factor", cfg.sim.room.reuse_factor);
  }
  if (j.contains("rates")) {
    const auto& r = j["rates"];
    maybe(r, "shape", cfg.sim.rates.shape);
    maybe(r, "scale_bps", cfg.sim.rates.scale_bps);
  }
  if (j.contains("lifi")) {
    const auto& l = j["lifi"];
    maybe(l, "bandwidth_hz", cfg.sim.lifi.bandwidth_hz);
    maybe(l, "optical_power_w", cfg.sim.lifi.optical_power_w);
    maybe(l, "half_power_semiangle_deg", cfg.sim.lifi.half_power_semiangle_deg);
    maybe(l, "fov_deg", cfg.sim.lifi.fov_deg);
    maybe(l, "nlos_enabled", cfg.sim.lifi.nlos_enabled);
    maybe(l, "wall_reflectivity", cfg.sim.lifi.wall_reflectivity);
  }
  if (j.contains("wifi")) {
    const auto& w = j["wifi"];
    maybe(w, "bandwidth_hz", cfg.sim.wifi.bandwidth_hz);
    maybe(w, "tx_power_dbm", cfg.sim.wifi.tx_power_dbm);
    maybe(w, "breakpoint_m", cfg.sim.wifi.breakpoint_m);
    maybe(w, "shadowing_sigma_db", cfg.sim.wifi.shadowing_sigma_db);
  }
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    maybe(d, "user_counts", cfg.gen.user_counts);
    maybe(d, "batches", cfg.gen.batches);
    maybe(d, "batch_size", cfg.gen.batch_size);
    maybe(d, "mapped_users", cfg.gen.mapped_users);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    maybe(t, "epochs", cfg.train.epochs);
    maybe(t, "batch_size", cfg.train.batch_size);
    maybe(t, "all_targets", cfg.train.all_targets);
    maybe(t, "lr", cfg.train.adam.lr);
    maybe(t, "test_fraction", cfg.test_fraction);
    std::uint64_t s = cfg.split_seed;
    maybe(t, "split_seed", s);
    cfg.split_seed = s;
  }
  if (j.contains("plan")) {
    const auto& p = j["plan"];
    if (p.contains("methods")) {
      cfg.plan.methods.clear();
      for (const auto& m : p["methods"])
        cfg.plan.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (p.contains("sweep")) {
      const auto s = p["sweep"].get<std::string>();
      if (s == "users")
        cfg.plan.sweep = SweepVar::Users;
      else if (s == "mean_rate")
        cfg.plan.sweep = SweepVar::MeanRate;
      else if (s == "clusters")
        cfg.plan.sweep = SweepVar::Clusters;
      else
        throw CLI::ValidationError("plan.sweep", "unknown sweep variable " + s);
    }
    maybe(p, "values", cfg.plan.sweep_values);
    maybe(p, "trials", cfg.plan.trials);
    maybe(p, "fixed_users", cfg.plan.fixed_users);
    maybe(p, "users_per_cluster", cfg.plan.users_per_cluster);
    if (p.contains("mode")) {
      const auto m = p["mode"].get<std::string>();
      if (m == "equal_share")
        cfg.plan.mode = AllocationMode::EqualShare;
      else if (m == "satisfaction_capped")
        cfg.plan.mode = AllocationMode::SatisfactionCapped;
      else
        throw CLI::ValidationError("plan.mode", "unknown allocation mode " + m);
    }
  }
  cfg.gen.sim = cfg.sim;
  cfg.plan.sim = cfg.sim;
  return cfg;
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  if (out_dir.empty()) return name;
  std::filesystem::create_directories(out_dir);
  return (std::filesystem::path(out_dir) / name).string();
}

// Link capacities for a stored dataset sample: row 0 is WiFi, the rest LiFi.
Matrix sample_capacity(const Matrix& snr_db, const SimConfig& sim) {
  Matrix cap(snr_db.rows(), snr_db.cols());
  for (std::size_t i = 0; i < snr_db.rows(); ++i)
    for (std::size_t j = 0; j < snr_db.cols(); ++j) {
      const double g = std::pow(10.0, snr_db(i, j) / 10.0);
      cap(i, j) = link_capacity(i == 0 ? ApKind::WiFi : ApKind::LiFi,
                                i == 0 ? sim.wifi.bandwidth_hz : sim.lifi.bandwidth_hz,
                                g);
    }
  return cap;
}

int cmd_scenario_dump(const AppConfig& cfg, std::uint64_t seed, int users,
                      const std::string& out_dir) {
  const auto snap = build_snapshot_uniform(cfg.sim, users, seed);
  json j;
  for (const auto& ap : snap.aps)
    j["aps"].push_back({{"id", ap.id},
                        {"kind", ap.kind == ApKind::WiFi ? "wifi" : "lifi"},
                        {"x", ap.position.x},
                        {"y", ap.position.y},
                        {"z", ap.position.z},
                        {"bandwidth_hz", ap.bandwidth_hz},
                        {"subband", ap.subband}});
  for (const auto& u : snap.users)
    j["users"].push_back({{"id", u.id},
                          {"x", u.position.x},
                          {"y", u.position.y},
                          {"required_rate_bps", u.required_rate_bps}});
  const auto snr_db = snr_to_db(snap.snr);
  for (std::size_t i = 0; i < snr_db.rows(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < snr_db.cols(); ++c) row.push_back(snr_db(i, c));
    j["snr_db"].push_back(row);
  }
  for (std::size_t i = 0; i < snap.capacity.rows(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < snap.capacity.cols(); ++c)
      row.push_back(snap.capacity(i, c));
    j["capacity_bps"].push_back(row);
  }
  j["seed"] = seed;
  if (out_dir.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    const auto p = out_path(out_dir, "scenario.json");
    std::ofstream(p) << j.dump(2) << "\n";
    std::printf("wrote %s\n", p.c_str());
  }
  return 0;
}

int cmd_dataset_generate(const AppConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir, const std::string& name) {
  const auto ds = generate(cfg.gen, seed, /*parallel=*/true);
  const auto p = out_path(out_dir, name);
  save(ds, p);
  std::printf("wrote %s: %zu samples, %u APs, M=%u, seed %llu\n", p.c_str(),
              ds.samples.size(), ds.n_aps, ds.mapped_users,
              static_cast<unsigned long long>(ds.seed));
  return 0;
}

int cmd_dataset_inspect(const std::string& path) {
  const auto ds = load(path);
  std::printf("file:          %s\n", path.c_str());
  std::printf("samples:       %zu\n", ds.samples.size());
  std::printf("aps:           %u\n", ds.n_aps);
  std::printf("mapped_users:  %u\n", ds.mapped_users);
  std::printf("seed:          %llu\n", static_cast<unsigned long long>(ds.seed));
  std::printf("config_digest: %016llx\n",
              static_cast<unsigned long long>(ds.config_digest));
  std::printf("snr bounds:    [%.2f, %.2f] dB\n", ds.norm.snr_min_db,
              ds.norm.snr_max_db);

  std::vector<std::size_t> per_count(64, 0), per_label(ds.n_aps, 0);
  for (const auto& s : ds.samples) {
    if (s.snr_db.cols() < per_count.size()) per_count[s.snr_db.cols()]++;
    for (auto l : s.labels)
      if (l < per_label.size()) per_label[l]++;
  }
  std::printf("user counts:  ");
  for (std::size_t n = 0; n < per_count.size(); ++n)
    if (per_count[n]) std::printf(" %zu x%zu", n, per_count[n]);
  std::printf("\nlabel histo:  ");
  for (std::size_t i = 0; i < per_label.size(); ++i)
    std::printf(" ap%zu:%zu", i, per_label[i]);
  std::printf("\n");
  return 0;
}

int cmd_train(const AppConfig& cfg, std::uint64_t seed, const std::string& data_path,
              const std::string& out_dir, const std::string& ckpt_name) {
  const auto ds = load(data_path);
  const auto [train_set, test_set] = split(ds, cfg.test_fraction, cfg.split_seed);
  std::printf("train %zu / test %zu samples\n", train_set.samples.size(),
              test_set.samples.size());

  TcnnShape shape;
  shape.n_aps = ds.n_aps;
  shape.max_users = ds.mapped_users;
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const auto result = train(train_set, test_set, shape, tc);
  for (const auto& e : result.history)
    std::printf("epoch %2d  train_loss %.5f  test_loss %.5f  test_acc %.4f\n",
                e.epoch, e.train_loss, e.test_loss, e.test_accuracy);

  const auto p = out_path(out_dir, ckpt_name);
  save_checkpoint(result.model, train_set.norm, seed, result.epochs_run, p);
  std::printf("wrote %s\n", p.c_str());
  return 0;
}

int cmd_eval(const AppConfig& cfg, const std::string& ckpt_path,
             const std::string& data_path) {
  auto ckpt = load_checkpoint(ckpt_path);
  auto ds = load(data_path);
  ds.norm = ckpt.norm;  // evaluate under the checkpoint's normalization
  const auto [loss, acc] = evaluate_model(ckpt.model, ds);

  double gap_sum = 0.0;
  for (const auto& s : ds.samples) {
    const auto pred =
        predict_assignment(ckpt.model, ckpt.norm, s.snr_db, s.requirements_bps);
    std::vector<int> lab(s.labels.begin(), s.labels.end());
    const auto cap = sample_capacity(s.snr_db, cfg.sim);
    gap_sum += performance_gap(pred, chi_from_labels(lab, s.snr_db.rows()), cap,
                               s.requirements_bps, AllocationMode::EqualShare);
  }
  std::printf("samples:  %zu\n", ds.samples.size());
  std::printf("loss:     %.5f\n", loss);
  std::printf("accuracy: %.4f\n", acc);
  std::printf("mean throughput gap vs labels: %.4f\n",
              gap_sum / static_cast<double>(ds.samples.size()));
  return 0;
}

int cmd_predict(const AppConfig& cfg, const std::string& ckpt_path, int users,
                std::uint64_t seed) {
  auto ckpt = load_checkpoint(ckpt_path);
  const auto snap = build_snapshot_uniform(cfg.sim, users, seed);
  const auto chi = predict_assignment(ckpt.model, ckpt.norm, snr_to_db(snap.snr),
                                      snap.requirements());
  const auto reqs = snap.requirements();
  const auto rho = allocate_time(chi, snap.capacity, reqs, AllocationMode::EqualShare);
  const auto sat = satisfaction({chi, rho}, snap.capacity, reqs);
  const auto labels = labels_from_chi(chi);
  std::printf("user  ap  rho     S       required_mbps\n");
  for (std::size_t j = 0; j < snap.n_users(); ++j)
    std::printf("%4zu  %2d  %.4f  %.4f  %.1f\n", j, labels[j],
                rho(static_cast<std::size_t>(labels[j]), j), sat[j], reqs[j] / 1e6);
  return 0;
}

int cmd_sweep(AppConfig cfg, std::uint64_t seed, const std::string& out_dir,
              const std::string& method_csv, const std::string& ckpt_path) {
  cfg.plan.master_seed = seed;
  cfg.plan.checkpoint_path = ckpt_path;
  if (!method_csv.empty()) {
    cfg.plan.methods.clear();
    std::stringstream ss(method_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
      cfg.plan.methods.push_back(method_from_string(tok));
  }
  const auto records = run_sweep(cfg.plan, /*parallel=*/true);
  write_records_csv(records, out_path(out_dir, "records.csv"));
  write_summary_csv(records, out_path(out_dir, "summary.csv"));
  write_manifest(cfg.plan, out_path(out_dir, "manifest.txt"));
  std::printf("wrote %zu records to %s\n", records.size(),
              out_dir.empty() ? "." : out_dir.c_str());
  return 0;
}

int cmd_cluster(AppConfig cfg, std::uint64_t seed, const std::string& out_dir) {
  cfg.plan.master_seed = seed;
  cfg.plan.sweep = SweepVar::Clusters;
  const auto rows = run_cluster_stress(cfg.plan, /*parallel=*/true);
  write_cluster_csv(rows, out_path(out_dir, "cluster.csv"));
  write_manifest(cfg.plan, out_path(out_dir, "manifest.txt"));
  for (const auto& r : rows)
    std::printf("%-6s clusters=%g clustered %.1f Mbps, uniform %.1f Mbps, loss %.1f%%\n",
                method_name(r.method).c_str(), r.clusters, r.clustered_mean_bps / 1e6,
                r.uniform_mean_bps / 1e6, r.relative_loss * 100.0);
  return 0;
}

int cmd_bench(AppConfig cfg, std::uint64_t seed, const std::string& out_dir,
              int repetitions, const std::string& ckpt_path) {
  cfg.plan.master_seed = seed;
  cfg.plan.checkpoint_path = ckpt_path;
  const auto rows = bench_runtime(cfg.plan, repetitions);
  write_bench_csv(rows, out_path(out_dir, "bench.csv"));
  for (const auto& r : rows)
    std::printf("%-6s users=%-3d median %.3f ms (min %.3f, max %.3f, reps %d)\n",
                method_name(r.method).c_str(), r.n_users, r.median_ns / 1e6,
                r.min_ns / 1e6, r.max_ns / 1e6, r.repetitions);
  return 0;
}

int cmd_oracle_validate(AppConfig cfg, std::uint64_t seed, const std::string& out_dir) {
  cfg.plan.master_seed = seed;
  const auto rows = validate_vs_oracle(cfg.plan, /*parallel=*/true);
  const auto p = out_path(out_dir, "oracle_validation.csv");
  std::ofstream os(p);
  os << "method,instances,mean_ratio,min_ratio\n";
  for (const auto& r : rows) {
    os << method_name(r.method) << ',' << r.instances << ',' << r.mean_ratio << ','
       << r.min_ratio << '\n';
    std::printf("%-6s mean ratio %.4f, min %.4f over %d instances\n",
                method_name(r.method).c_str(), r.mean_ratio, r.min_ratio, r.instances);
  }
  std::printf("wrote %s\n", p.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid LiFi/WiFi load-balancing simulator and learning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, method_csv, ckpt_path;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "master random seed")->capture_default_str();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--method", method_csv, "comma-separated method list");
  app.add_option("--checkpoint", ckpt_path, "model checkpoint path");

  // scenario dump
  auto* scenario = app.add_subcommand("scenario", "scenario inspection");
  scenario->require_subcommand(1);
  auto* dump = scenario->add_subcommand("dump", "dump one snapshot as JSON");
  int dump_users = 10;
  dump->add_option("--users", dump_users, "user count")->capture_default_str();

  // dataset generate | inspect
  auto* dataset = app.add_subcommand("dataset", "dataset pipeline");
  dataset->require_subcommand(1);
  auto* gen = dataset->add_subcommand("generate", "generate a labeled dataset");
  std::string gen_name = "dataset.bin";
  gen->add_option("--name", gen_name, "output file name")->capture_default_str();
  auto* inspect = dataset->add_subcommand("inspect", "print dataset header and stats");
  std::string inspect_path;
  inspect->add_option("file", inspect_path, "dataset file")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model on a dataset");
  std::string train_data, train_ckpt_name = "checkpoint.bin";
  train_cmd->add_option("--data", train_data, "dataset file")->required();
  train_cmd->add_option("--name", train_ckpt_name, "checkpoint file name")
      ->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string eval_data;
  eval_cmd->add_option("--data", eval_data, "dataset file")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "assign users in a fresh snapshot");
  int predict_users = 10;
  predict_cmd->add_option("--users", predict_users, "user count")
      ->capture_default_str();

  // harness
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo method sweep");
  auto* cluster_cmd = app.add_subcommand("cluster", "clustered-user stress test");
  auto* bench_cmd = app.add_subcommand("bench", "per-method runtime benchmark");
  int bench_reps = 30;
  bench_cmd->add_option("--reps", bench_reps, "timing repetitions")
      ->capture_default_str();
  auto* oracle_cmd =
      app.add_subcommand("oracle-validate", "small-instance oracle comparison");

  CLI11_PARSE(app, argc, argv);

  try {
    const AppConfig cfg = load_config(config_path);
    if (dump->parsed()) return cmd_scenario_dump(cfg, seed, dump_users, out_dir);
    if (gen->parsed()) return cmd_dataset_generate(cfg, seed, out_dir, gen_name);
    if (inspect->parsed()) return cmd_dataset_inspect(inspect_path);
    if (train_cmd->parsed())
      return cmd_train(cfg, seed, train_data, out_dir, train_ckpt_name);
    if (eval_cmd->parsed()) {
      if (ckpt_path.empty())
        throw CLI::ValidationError("--checkpoint", "required for eval");
      return cmd_eval(cfg, ckpt_path, eval_data);
    }
    if (predict_cmd->parsed()) {
      if (ckpt_path.empty())
        throw CLI::ValidationError("--checkpoint", "required for predict");
      return cmd_predict(cfg, ckpt_path, predict_users, seed);
    }
    if (sweep_cmd->parsed())
      return cmd_sweep(cfg, seed, out_dir, method_csv, ckpt_path);
    if (cluster_cmd->parsed()) return cmd_cluster(cfg, seed, out_dir);
    if (bench_cmd->parsed())
      return cmd_bench(cfg, seed, out_dir, bench_reps, ckpt_path);
    if (oracle_cmd->parsed()) return cmd_oracle_validate(cfg, seed, out_dir);
    std::fprintf(stderr, "no subcommand action selected\n");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
