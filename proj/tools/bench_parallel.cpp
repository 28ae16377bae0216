// Compares the OpenMP-parallel kernels against their serial reference
// paths: dataset generation, the Monte-Carlo sweep, and the oracle
// validation loop. Also asserts bit-identical outputs.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "hlwnet/dataset.hpp"
#include "hlwnet/harness.hpp"

using namespace hlwnet;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double seconds(F f) {
  const auto a = Clock::now();
  f();
  const auto b = Clock::now();
  return std::chrono::duration_cast<std::chrono::duration<double>>(b - a).count();
}

void row(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-20s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s,
              identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
  std::printf("threads: %d, scale: %d\n\n", omp_get_max_threads(), scale);
  bool all_identical = true;

  {
    GenerateConfig cfg;
    cfg.user_counts = {5, 8, 10};
    cfg.batches = 10 * scale;
    cfg.batch_size = 64;
    cfg.mapped_users = 10;
    Dataset ser, par;
    const double ts = seconds([&] { ser = generate_serial(cfg, 42); });
    const double tp = seconds([&] { par = generate(cfg, 42, true); });
    bool same = ser.samples.size() == par.samples.size();
    for (std::size_t k = 0; same && k < ser.samples.size(); ++k)
      same = ser.samples[k] == par.samples[k];
    all_identical = all_identical && same;
    row("dataset generate", ts, tp, same);
  }

  {
    ExperimentPlan plan;
    plan.methods = {Method::Sss, Method::Gt, Method::FlOpt};
    plan.sweep_values = {5, 10, 15, 20};
    plan.trials = 25 * scale;
    plan.master_seed = 7;
    std::vector<RunRecord> ser, par;
    const double ts = seconds([&] { ser = run_sweep(plan, false); });
    const double tp = seconds([&] { par = run_sweep(plan, true); });
    bool same = ser.size() == par.size();
    for (std::size_t k = 0; same && k < ser.size(); ++k)
      same = ser[k].throughput_bps == par[k].throughput_bps &&
             ser[k].jain == par[k].jain && ser[k].objective == par[k].objective;
    all_identical = all_identical && same;
    row("run_sweep", ts, tp, same);
  }

  {
    ExperimentPlan plan;
    plan.methods = {Method::Oracle, Method::Sss, Method::FlOpt};
    plan.sweep_values = {4, 5, 6};
    plan.trials = 50 * scale;
    plan.master_seed = 7;
    std::vector<OracleValidationRow> ser, par;
    const double ts = seconds([&] { ser = validate_vs_oracle(plan, false); });
    const double tp = seconds([&] { par = validate_vs_oracle(plan, true); });
    bool same = ser.size() == par.size();
    for (std::size_t k = 0; same && k < ser.size(); ++k)
      same = ser[k].mean_ratio == par[k].mean_ratio &&
             ser[k].min_ratio == par[k].min_ratio;
    all_identical = all_identical && same;
    row("validate_vs_oracle", ts, tp, same);
  }

  return all_identical ? 0 : 1;
}
