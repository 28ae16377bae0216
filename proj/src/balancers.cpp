#include "hlwnet/balancers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hlwnet/rng.hpp"

namespace hlwnet {

namespace {

double snr_db(double linear) { return 10.0 * std::log10(std::max(linear, 1e-300)); }

// Satisfaction of user j if it joined AP i whose load (excluding j) is
// `others`, under equal-share TDMA.
double prospective_satisfaction(const Snapshot& snap, std::size_t i, std::size_t j,
                                std::size_t others) {
  const double share = 1.0 / static_cast<double>(others + 1);
  return std::min(share * snap.capacity(i, j) / snap.users[j].required_rate_bps, 1.0);
}

std::vector<std::size_t> ap_loads(const Snapshot& snap, const std::vector<int>& ap_of_user) {
  std::vector<std::size_t> load(snap.n_aps(), 0);
  for (int a : ap_of_user)
    if (a >= 0) ++load[static_cast<std::size_t>(a)];
  return load;
}

}  // namespace

Matrix sss_assign(const Matrix& snr) {
  if (snr.cols() == 0) throw std::invalid_argument("sss_assign: no users");
  std::vector<int> ap(snr.cols(), 0);
  for (std::size_t j = 0; j < snr.cols(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < snr.rows(); ++i)
      if (snr(i, j) > snr(best, j)) best = i;
    ap[j] = static_cast<int>(best);
  }
  return chi_from_labels(ap, snr.rows());
}

double gt_payoff(const Snapshot& snap, const std::vector<int>& ap_of_user,
                 std::size_t j, std::size_t i, GtConfig::Payoff payoff) {
  std::size_t others = 0;
  for (std::size_t k = 0; k < ap_of_user.size(); ++k)
    if (k != j && ap_of_user[k] == static_cast<int>(i)) ++others;
  const double s = prospective_satisfaction(snap, i, j, others);
  if (payoff == GtConfig::Payoff::LogSatisfaction) return std::log(std::max(s, 1e-300));
  return s;
}

GtResult gt_assign(const Snapshot& snap, const GtConfig& cfg, std::uint64_t rng_seed) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("gt_assign: max_iterations >= 1");
  std::vector<int> ap = labels_from_chi(sss_assign(snap.snr));
  Rng rng(rng_seed);
  std::vector<std::size_t> order(ap.size());
  std::iota(order.begin(), order.end(), 0);

  GtResult res;
  for (res.sweeps = 0; res.sweeps < cfg.max_iterations; ++res.sweeps) {
    std::shuffle(order.begin(), order.end(), rng);
    bool moved = false;
    for (std::size_t j : order) {
      const std::size_t cur = static_cast<std::size_t>(ap[j]);
      double best_payoff = gt_payoff(snap, ap, j, cur, cfg.payoff);
      std::size_t best_ap = cur;
      for (std::size_t i = 0; i < snap.n_aps(); ++i) {
        if (i == cur) continue;
        const double p = gt_payoff(snap, ap, j, i, cfg.payoff);
        if (p > best_payoff + 1e-12) {
          best_payoff = p;
          best_ap = i;
        }
      }
      if (best_ap != cur) {
        ap[j] = static_cast<int>(best_ap);
        moved = true;
      }
    }
    if (!moved) {
      res.converged = true;
      ++res.sweeps;
      break;
    }
  }
  res.chi = chi_from_labels(ap, snap.n_aps());
  return res;
}

double ap_availability(const Snapshot& snap, const std::vector<int>& ap_of_user,
                       std::size_t i) {
  double load = 0.0;
  for (std::size_t j = 0; j < ap_of_user.size(); ++j) {
    if (ap_of_user[j] != static_cast<int>(i)) continue;
    const double c = snap.capacity(i, j);
    if (c <= 0.0) return 0.0;
    load += snap.users[j].required_rate_bps / c;
  }
  return std::max(0.0, 1.0 - load);
}

std::size_t strongest_lifi_ap(const Snapshot& snap, std::size_t j) {
  std::size_t best = snap.n_aps();
  for (std::size_t i = 0; i < snap.n_aps(); ++i) {
    if (snap.aps[i].kind != ApKind::LiFi) continue;
    if (best == snap.n_aps() || snap.snr(i, j) > snap.snr(best, j)) best = i;
  }
  if (best == snap.n_aps()) throw std::runtime_error("snapshot has no LiFi AP");
  return best;
}

FuzzyInputs fuzzy_inputs_for_user(const Snapshot& snap,
                                  const std::vector<int>& ap_of_user, std::size_t j) {
  std::size_t wifi = snap.n_aps();
  for (std::size_t i = 0; i < snap.n_aps(); ++i)
    if (snap.aps[i].kind == ApKind::WiFi) wifi = i;
  if (wifi == snap.n_aps()) throw std::runtime_error("snapshot has no WiFi AP");
  const std::size_t lifi = strongest_lifi_ap(snap, j);

  FuzzyInputs in;
  in.req_mbps = snap.users[j].required_rate_bps / 1e6;
  in.wifi_snr_db = snr_db(snap.snr(wifi, j));
  in.lifi_snr_db = snr_db(snap.snr(lifi, j));
  in.wifi_ava = ap_availability(snap, ap_of_user, wifi);
  in.lifi_ava = ap_availability(snap, ap_of_user, lifi);
  return in;
}

Matrix fl_assign(const Snapshot& snap, const FuzzyRuleTable& table, double threshold) {
  const std::size_t n = snap.n_users();
  std::vector<int> ap(n, -1);

  std::vector<std::pair<double, std::size_t>> scored(n);
  for (std::size_t j = 0; j < n; ++j)
    scored[j] = {table.infer(fuzzy_inputs_for_user(snap, ap, j)), j};
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::size_t wifi = 0;
  for (std::size_t i = 0; i < snap.n_aps(); ++i)
    if (snap.aps[i].kind == ApKind::WiFi) wifi = i;

  // Stage 1: admit to WiFi in descending score, rescoring against the
  // shrinking WiFi availability; stop at the first sub-threshold user.
  for (const auto& [initial_score, j] : scored) {
    const double score = table.infer(fuzzy_inputs_for_user(snap, ap, j));
    if (score < threshold) break;
    ap[j] = static_cast<int>(wifi);
  }

  // Stage 2: remaining users take their strongest LiFi AP.
  for (std::size_t j = 0; j < n; ++j)
    if (ap[j] < 0) ap[j] = static_cast<int>(strongest_lifi_ap(snap, j));
  return chi_from_labels(ap, snap.n_aps());
}

Matrix flopt_assign(const Snapshot& snap, const FuzzyRuleTable& table) {
  const std::size_t n = snap.n_users();
  std::vector<int> ap(n, -1);
  std::size_t wifi = 0;
  for (std::size_t i = 0; i < snap.n_aps(); ++i)
    if (snap.aps[i].kind == ApKind::WiFi) wifi = i;

  for (std::size_t assigned = 0; assigned < n; ++assigned) {
    const auto load = ap_loads(snap, ap);
    double best_pair_score = -1.0;
    std::size_t best_user = 0, best_ap = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ap[j] >= 0) continue;
      // Candidate AP: the one maximizing this user's prospective
      // satisfaction under equal-share re-allocation.
      std::size_t cand = 0;
      double cand_s = -1.0;
      for (std::size_t i = 0; i < snap.n_aps(); ++i) {
        const double s = prospective_satisfaction(snap, i, j, load[i]);
        if (s > cand_s + 1e-15) {
          cand_s = s;
          cand = i;
        }
      }
      const double wifi_score = table.infer(fuzzy_inputs_for_user(snap, ap, j));
      const double pair_score = (cand == wifi) ? wifi_score : 1.0 - wifi_score;
      if (pair_score > best_pair_score) {
        best_pair_score = pair_score;
        best_user = j;
        best_ap = cand;
      }
    }
    ap[best_user] = static_cast<int>(best_ap);
  }
  return chi_from_labels(ap, snap.n_aps());
}

Matrix exhaustive_oracle(const Snapshot& snap, AllocationMode mode) {
  const std::size_t na = snap.n_aps();
  const std::size_t nu = snap.n_users();
  double combos = 1.0;
  for (std::size_t j = 0; j < nu; ++j) combos *= static_cast<double>(na);
  if (combos > 1e7) throw std::invalid_argument("exhaustive_oracle: instance too large");

  const auto req = snap.requirements();
  std::vector<int> current(nu, 0), best;
  double best_obj = -std::numeric_limits<double>::infinity();

  while (true) {
    const Matrix chi = chi_from_labels(current, na);
    const Matrix rho = allocate_time(chi, snap.capacity, req, mode);
    const auto sat = satisfaction({chi, rho}, snap.capacity, req);
    const double obj = log_satisfaction_objective(sat);
    if (obj > best_obj) {  // strict: ties keep the lexicographically first
      best_obj = obj;
      best = current;
    }
    // Odometer, last user fastest: lexicographic enumeration order.
    std::size_t k = nu;
    while (k > 0) {
      --k;
      if (++current[k] < static_cast<int>(na)) break;
      current[k] = 0;
      if (k == 0) return chi_from_labels(best, na);
    }
  }
}

}  // namespace hlwnet
