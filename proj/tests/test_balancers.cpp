#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hlwnet/balancers.hpp"
#include "hlwnet/simulation.hpp"

using namespace hlwnet;

namespace {

// Synthetic snapshot with one WiFi AP plus LiFi APs and free-form SNRs,
// for tests that need full control over the link table.
Snapshot synthetic(std::size_t n_lifi, std::size_t n_users, std::mt19937_64& rng,
                   double req_lo = 50e6, double req_hi = 300e6) {
  Snapshot s;
  for (std::size_t i = 0; i <= n_lifi; ++i) {
    ApDescriptor ap;
    ap.id = static_cast<int>(i);
    ap.kind = (i == 0) ? ApKind::WiFi : ApKind::LiFi;
    ap.bandwidth_hz = 20e6;
    s.aps.push_back(ap);
  }
  std::uniform_real_distribution<double> snr_db(10.0, 60.0), req(req_lo, req_hi);
  s.snr = Matrix(n_lifi + 1, n_users);
  for (std::size_t j = 0; j < n_users; ++j) {
    UserDescriptor u;
    u.id = static_cast<int>(j);
    u.required_rate_bps = req(rng);
    s.users.push_back(u);
    for (std::size_t i = 0; i <= n_lifi; ++i)
      s.snr(i, j) = std::pow(10.0, snr_db(rng) / 10.0);
  }
  s.capacity = capacity_matrix(s.aps, s.snr);
  return s;
}

SimConfig default_sim() { return SimConfig{}; }

double objective_of(const Snapshot& snap, const Matrix& chi, AllocationMode mode) {
  const auto req = snap.requirements();
  const auto rho = allocate_time(chi, snap.capacity, req, mode);
  return log_satisfaction_objective(satisfaction({chi, rho}, snap.capacity, req));
}

}  // namespace

TEST_CASE("SSS matches an independent per-column argmax oracle") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1e5);
  for (int it = 0; it < 100; ++it) {
    const std::size_t na = 2 + rng() % 5, nu = 1 + rng() % 8;
    Matrix snr(na, nu);
    for (auto& v : snr.data()) v = d(rng);
    const auto chi = sss_assign(snr);
    check_column_valid(chi);
    const auto labels = labels_from_chi(chi);
    for (std::size_t j = 0; j < nu; ++j) {
      std::size_t want = 0;
      for (std::size_t i = 1; i < na; ++i)
        if (snr(i, j) > snr(want, j)) want = i;
      CHECK(labels[j] == static_cast<int>(want));
    }
  }
}

TEST_CASE("SSS breaks ties toward the lowest AP index") {
  Matrix snr(3, 2, 5.0);  // all equal
  snr(2, 1) = 9.0;
  const auto labels = labels_from_chi(sss_assign(snr));
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 2);
}

TEST_CASE("SSS is column-independent under user permutation") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.0, 100.0);
  Matrix snr(4, 6);
  for (auto& v : snr.data()) v = d(rng);
  const auto base = labels_from_chi(sss_assign(snr));
  Matrix perm(4, 6);
  const std::vector<std::size_t> p = {3, 0, 5, 1, 4, 2};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) perm(i, j) = snr(i, p[j]);
  const auto permuted = labels_from_chi(sss_assign(perm));
  for (std::size_t j = 0; j < 6; ++j) CHECK(permuted[j] == base[p[j]]);
}

TEST_CASE("GT result is a Nash point: no improving unilateral deviation") {
  std::mt19937_64 rng(3);
  GtConfig cfg;
  for (int it = 0; it < 30; ++it) {
    const auto snap = synthetic(3, 4 + rng() % 5, rng);
    const auto res = gt_assign(snap, cfg, rng());
    REQUIRE(res.converged);
    const auto ap = labels_from_chi(res.chi);
    for (std::size_t j = 0; j < snap.n_users(); ++j) {
      const double cur =
          gt_payoff(snap, ap, j, static_cast<std::size_t>(ap[j]), cfg.payoff);
      for (std::size_t i = 0; i < snap.n_aps(); ++i)
        CHECK(gt_payoff(snap, ap, j, i, cfg.payoff) <= cur + 1e-12);
    }
  }
}

TEST_CASE("GT with a single user lands on the max-capacity AP") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 20; ++it) {
    auto snap = synthetic(3, 1, rng, 500e6, 900e6);  // demand binds everywhere
    const auto res = gt_assign(snap, GtConfig{}, 99);
    const auto ap = labels_from_chi(res.chi);
    std::size_t want = 0;
    for (std::size_t i = 1; i < snap.n_aps(); ++i)
      if (snap.capacity(i, 0) > snap.capacity(want, 0)) want = i;
    CHECK(ap[0] == static_cast<int>(want));
  }
}

TEST_CASE("GT never falls below SSS on small instances (Monte Carlo)") {
  std::mt19937_64 rng(5);
  int wins = 0;
  const int trials = 500;
  for (int it = 0; it < trials; ++it) {
    const auto snap = synthetic(1, 3, rng);  // 2 APs, 3 users
    const double sss = objective_of(snap, sss_assign(snap.snr),
                                    AllocationMode::EqualShare);
    const double gt = objective_of(snap, gt_assign(snap, GtConfig{}, rng()).chi,
                                   AllocationMode::EqualShare);
    if (gt >= sss - 1e-9) ++wins;
  }
  CHECK(wins >= trials * 9 / 10);
}

TEST_CASE("GT is deterministic per seed and reports sweep counts") {
  std::mt19937_64 rng(6);
  const auto snap = synthetic(3, 8, rng);
  const auto a = gt_assign(snap, GtConfig{}, 7);
  const auto b = gt_assign(snap, GtConfig{}, 7);
  CHECK(a.chi == b.chi);
  CHECK(a.sweeps == b.sweeps);
  CHECK(a.sweeps >= 1);
  GtConfig capped;
  capped.max_iterations = 1;
  const auto c = gt_assign(snap, capped, 7);
  CHECK(c.sweeps <= 1);
}

TEST_CASE("AP availability follows the demand-load formula") {
  std::mt19937_64 rng(7);
  auto snap = synthetic(2, 3, rng);
  snap.users[0].required_rate_bps = 0.3 * snap.capacity(1, 0);
  snap.users[1].required_rate_bps = 0.4 * snap.capacity(1, 1);
  std::vector<int> ap = {1, 1, -1};
  CHECK(ap_availability(snap, ap, 1) == doctest::Approx(0.3));
  CHECK(ap_availability(snap, ap, 0) == doctest::Approx(1.0));
  CHECK(ap_availability(snap, ap, 2) == doctest::Approx(1.0));
  snap.users[2].required_rate_bps = 10.0 * snap.capacity(1, 2);
  ap[2] = 1;
  CHECK(ap_availability(snap, ap, 1) == 0.0);  // overloaded clamps at zero
}

TEST_CASE("fuzzy inputs pick the WiFi row and the strongest LiFi AP") {
  std::mt19937_64 rng(8);
  auto snap = synthetic(3, 2, rng);
  snap.users[0].required_rate_bps = 120e6;
  const std::vector<int> none(2, -1);
  const auto in = fuzzy_inputs_for_user(snap, none, 0);
  CHECK(in.req_mbps == doctest::Approx(120.0));
  CHECK(in.wifi_snr_db == doctest::Approx(10.0 * std::log10(snap.snr(0, 0))));
  const std::size_t best = strongest_lifi_ap(snap, 0);
  CHECK(best >= 1);
  CHECK(in.lifi_snr_db == doctest::Approx(10.0 * std::log10(snap.snr(best, 0))));
  CHECK(in.wifi_ava == 1.0);
  CHECK(in.lifi_ava == 1.0);
}

TEST_CASE("FL: threshold above 1 reduces to LiFi-only SSS") {
  std::mt19937_64 rng(9);
  const FuzzyRuleTable table(100.0);
  for (int it = 0; it < 20; ++it) {
    const auto snap = synthetic(3, 6, rng);
    const auto labels = labels_from_chi(fl_assign(snap, table, 1.01));
    for (std::size_t j = 0; j < snap.n_users(); ++j)
      CHECK(labels[j] == static_cast<int>(strongest_lifi_ap(snap, j)));
  }
}

TEST_CASE("FL: threshold zero admits everyone to WiFi") {
  std::mt19937_64 rng(10);
  const FuzzyRuleTable table(100.0);
  const auto snap = synthetic(3, 6, rng);
  const auto labels = labels_from_chi(fl_assign(snap, table, 0.0));
  for (int a : labels) CHECK(a == 0);
}

TEST_CASE("FL and FL-OPT outputs are column-valid on realistic snapshots") {
  const auto sim = default_sim();
  const FuzzyRuleTable table(sim.rates.mean_bps() / 1e6);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto snap = build_snapshot_uniform(sim, 6, seed);
    CHECK_NOTHROW(check_column_valid(fl_assign(snap, table)));
    CHECK_NOTHROW(check_column_valid(flopt_assign(snap, table)));
  }
}

TEST_CASE("FL-OPT with one demand-bound user takes the max-capacity AP") {
  std::mt19937_64 rng(11);
  const FuzzyRuleTable table(100.0);
  for (int it = 0; it < 20; ++it) {
    const auto snap = synthetic(3, 1, rng, 500e6, 900e6);
    const auto labels = labels_from_chi(flopt_assign(snap, table));
    std::size_t want = 0;
    for (std::size_t i = 1; i < snap.n_aps(); ++i)
      if (snap.capacity(i, 0) > snap.capacity(want, 0) + 1e-9) want = i;
    CHECK(labels[0] == static_cast<int>(want));
  }
}

TEST_CASE("exhaustive oracle agrees with a recursive brute force") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 20; ++it) {
    const auto snap = synthetic(2, 3, rng);  // 3^... = 27 assignments
    const auto chi = exhaustive_oracle(snap, AllocationMode::EqualShare);
    const double obj = objective_of(snap, chi, AllocationMode::EqualShare);
    // Independent check: every assignment scored via evaluate().
    const auto req = snap.requirements();
    double best = -1e300;
    std::vector<int> cur(3, 0);
    for (cur[0] = 0; cur[0] < 3; ++cur[0])
      for (cur[1] = 0; cur[1] < 3; ++cur[1])
        for (cur[2] = 0; cur[2] < 3; ++cur[2]) {
          const auto rep = evaluate(chi_from_labels(cur, 3), snap.capacity, req,
                                    AllocationMode::EqualShare);
          best = std::max(best, rep.objective);
        }
    CHECK(obj == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("oracle dominates every reference method") {
  const auto sim = default_sim();
  const FuzzyRuleTable table(sim.rates.mean_bps() / 1e6);
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto snap = build_snapshot_uniform(sim, 5, seed);
    const double opt = objective_of(snap, exhaustive_oracle(snap),
                                    AllocationMode::EqualShare);
    for (const Matrix& chi :
         {sss_assign(snap.snr), gt_assign(snap, GtConfig{}, seed).chi,
          fl_assign(snap, table), flopt_assign(snap, table)}) {
      CHECK(objective_of(snap, chi, AllocationMode::EqualShare) <= opt + 1e-12);
    }
  }
}

TEST_CASE("oracle refuses oversized instances") {
  std::mt19937_64 rng(13);
  const auto snap = synthetic(9, 9, rng);  // 10^9 assignments
  CHECK_THROWS(exhaustive_oracle(snap));
}
