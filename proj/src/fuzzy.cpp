#include "hlwnet/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hlwnet {

Membership::Membership(std::vector<double> xs, std::vector<double> mus)
    : xs_(std::move(xs)), mus_(std::move(mus)) {
  if (xs_.size() != mus_.size() || xs_.size() < 2)
    throw std::invalid_argument("Membership: need matching breakpoint lists");
  if (!std::is_sorted(xs_.begin(), xs_.end()))
    throw std::invalid_argument("Membership: breakpoints must be sorted");
}

double Membership::operator()(double x) const {
  if (x <= xs_.front()) return mus_.front();
  if (x >= xs_.back()) return mus_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
  return mus_[k - 1] + t * (mus_[k] - mus_[k - 1]);
}

Membership Membership::left_shoulder(double full_until, double zero_at) {
  return Membership({full_until, zero_at}, {1.0, 0.0});
}

Membership Membership::triangle(double lo, double peak, double hi) {
  return Membership({lo, peak, hi}, {0.0, 1.0, 0.0});
}

Membership Membership::right_shoulder(double zero_until, double full_at) {
  return Membership({zero_until, full_at}, {0.0, 1.0});
}

double FuzzyVariable::grade(Term t, double x) const {
  x = std::clamp(x, lo, hi);
  switch (t) {
    case Term::Any: return 1.0;
    case Term::Low: return low(x);
    case Term::Medium: return medium(x);
    case Term::High: return high(x);
    case Term::NotLow: return 1.0 - low(x);
    case Term::NotHigh: return 1.0 - high(x);
  }
  return 0.0;
}

FuzzyRuleTable::FuzzyRuleTable(double mean_rate_mbps) {
  if (mean_rate_mbps <= 0.0)
    throw std::invalid_argument("FuzzyRuleTable: mean rate must be > 0");
  const double rbar = mean_rate_mbps;

  req_ = {"req", 0.0, 10000.0, Membership::left_shoulder(0.0, rbar),
          Membership::triangle(0.0, rbar, 2.0 * rbar),
          Membership::right_shoulder(rbar, 2.0 * rbar)};
  snr_ = {"snr", 10.0, 70.0, Membership::left_shoulder(25.0, 40.0),
          Membership::triangle(25.0, 40.0, 44.0),
          Membership::right_shoulder(40.0, 44.0)};
  ava_ = {"ava", 0.0, 1.0, Membership::left_shoulder(0.0, 0.3),
          Membership::triangle(0.0, 0.3, 0.6),
          Membership::right_shoulder(0.3, 0.6)};
  sel_ = {"wifi_sel", 0.0, 1.0, Membership::left_shoulder(0.0, 0.5),
          Membership::triangle(0.0, 0.5, 1.0),
          Membership::right_shoulder(0.5, 1.0)};

  using T = Term;
  rules_ = {
      {T::Low, T::Any, T::Any, T::NotLow, T::Any, T::High},
      {T::NotLow, T::Any, T::Any, T::NotLow, T::Any, T::Medium},
      {T::Any, T::Any, T::Any, T::Low, T::NotLow, T::Low},
      {T::Any, T::Low, T::NotLow, T::Low, T::Low, T::Low},
      {T::Any, T::Low, T::Low, T::Low, T::Low, T::Medium},
      {T::Any, T::NotLow, T::Low, T::Low, T::Low, T::High},
      {T::Any, T::NotLow, T::NotLow, T::Low, T::Low, T::Medium},
      {T::High, T::Any, T::High, T::Any, T::Any, T::Low},
      {T::NotHigh, T::High, T::Any, T::NotLow, T::Any, T::High},
  };
}

double FuzzyRuleTable::firing_strength(const FuzzyRule& rule, const FuzzyInputs& in) const {
  double s = 1.0;
  auto apply = [&s](double g) { s = std::min(s, g); };
  if (rule.req != Term::Any) apply(req_.grade(rule.req, in.req_mbps));
  if (rule.wifi_snr != Term::Any) apply(snr_.grade(rule.wifi_snr, in.wifi_snr_db));
  if (rule.lifi_snr != Term::Any) apply(snr_.grade(rule.lifi_snr, in.lifi_snr_db));
  if (rule.wifi_ava != Term::Any) apply(ava_.grade(rule.wifi_ava, in.wifi_ava));
  if (rule.lifi_ava != Term::Any) apply(ava_.grade(rule.lifi_ava, in.lifi_ava));
  return s;
}

double FuzzyRuleTable::infer(const FuzzyInputs& in) const {
  std::array<double, 3> strength = {0.0, 0.0, 0.0};  // Low / Medium / High
  for (const FuzzyRule& r : rules_) {
    const double s = firing_strength(r, in);
    std::size_t k = 0;
    if (r.consequent == Term::Medium) k = 1;
    else if (r.consequent == Term::High) k = 2;
    strength[k] = std::max(strength[k], s);
  }

  constexpr int kGrid = 1000;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    const double mu = std::max({std::min(strength[0], sel_.low(x)),
                                std::min(strength[1], sel_.medium(x)),
                                std::min(strength[2], sel_.high(x))});
    num += x * mu;
    den += mu;
  }
  if (den == 0.0) return 0.5;  // no rule fires at all
  return num / den;
}

}  // namespace hlwnet
