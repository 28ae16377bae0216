#pragma once

#include <array>
#include <string>
#include <vector>

namespace hlwnet {

// Piecewise-linear membership function; flat extrapolation outside the
// listed breakpoints.
class Membership {
 public:
  Membership() = default;
  Membership(std::vector<double> xs, std::vector<double> mus);

  double operator()(double x) const;

  static Membership left_shoulder(double full_until, double zero_at);
  static Membership triangle(double lo, double peak, double hi);
  static Membership right_shoulder(double zero_until, double full_at);

 private:
  std::vector<double> xs_;
  std::vector<double> mus_;
};

enum class Term { Any, Low, Medium, High, NotLow, NotHigh };

struct FuzzyVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  Membership low, medium, high;

  // Clamps to the universe, then evaluates the named term.
  double grade(Term t, double x) const;
};

struct FuzzyRule {
  Term req = Term::Any;
  Term wifi_snr = Term::Any;
  Term lifi_snr = Term::Any;
  Term wifi_ava = Term::Any;
  Term lifi_ava = Term::Any;
  Term consequent = Term::Medium;  // WiFi selection: Low / Medium / High
};

struct FuzzyInputs {
  double req_mbps = 0.0;
  double wifi_snr_db = 0.0;
  double lifi_snr_db = 0.0;  // strongest LiFi AP of the user
  double wifi_ava = 0.0;
  double lifi_ava = 0.0;
};

// The nine-rule WiFi-selection table with the published breakpoints:
// SNR (25, 40, 44) dB on [10, 70]; requirement (0, R, 2R) Mbps on
// [0, 10000]; availability (0, 0.3, 0.6) on [0, 1].
class FuzzyRuleTable {
 public:
  explicit FuzzyRuleTable(double mean_rate_mbps);

  std::size_t rule_count() const { return rules_.size(); }
  const std::vector<FuzzyRule>& rules() const { return rules_; }

  double firing_strength(const FuzzyRule& rule, const FuzzyInputs& in) const;

  // Mamdani min-implication, max aggregation, centroid defuzzification
  // over the [0, 1] selection universe.
  double infer(const FuzzyInputs& in) const;

  const FuzzyVariable& output() const { return sel_; }

 private:
  FuzzyVariable req_, snr_, ava_, sel_;
  std::vector<FuzzyRule> rules_;
};

}  // namespace hlwnet
