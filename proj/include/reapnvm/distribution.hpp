#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace reapnvm {

/// Mass below this at the end of a pmf is dropped into truncated_mass.
inline constexpr double kTailDropThreshold = 1e-12;

/// Probability mass function over nonnegative operation counts.
///
/// pmf[k] is P(count == k). Mass that is not stored lives in one of two
/// buckets: `truncated_mass` (tail entries dropped for storage, location
/// unknown but beyond the support they were cut from) and `overflow_mass`
/// (counts strictly greater than the cap, used by capped convolution, where
/// the cap is pmf.size() - 1).
struct CountDistribution {
  std::vector<double> pmf;
  double truncated_mass = 0.0;
  double overflow_mass = 0.0;

  static CountDistribution point_mass(std::size_t k) {
    CountDistribution d;
    d.pmf.assign(k + 1, 0.0);
    d.pmf[k] = 1.0;
    return d;
  }

  double stored_mass() const { return std::accumulate(pmf.begin(), pmf.end(), 0.0); }
  double total_mass() const { return stored_mass() + truncated_mass + overflow_mass; }

  /// Mean over the stored support. Ignores truncated and overflow mass.
  double mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
    return m;
  }

  double at(std::size_t k) const { return k < pmf.size() ? pmf[k] : 0.0; }

  /// Drops trailing entries below `threshold` into truncated_mass.
  void trim_tail(double threshold = kTailDropThreshold) {
    while (pmf.size() > 1 && pmf.back() < threshold) {
      truncated_mass += pmf.back();
      pmf.pop_back();
    }
  }
};

/// Total-variation distance over the stored supports, treating truncated and
/// overflow buckets as one extra atom each.
inline double total_variation(const CountDistribution& a, const CountDistribution& b) {
  const auto n = std::max(a.pmf.size(), b.pmf.size());
  double tv = 0.0;
  for (std::size_t k = 0; k < n; ++k) tv += std::abs(a.at(k) - b.at(k));
  tv += std::abs(a.truncated_mass - b.truncated_mass);
  tv += std::abs(a.overflow_mass - b.overflow_mass);
  return 0.5 * tv;
}

inline nlohmann::ordered_json to_json(const CountDistribution& d) {
  return {{"pmf", d.pmf}, {"truncated_mass", d.truncated_mass}, {"overflow_mass", d.overflow_mass}};
}

inline CountDistribution distribution_from_json(const nlohmann::json& j) {
  CountDistribution d;
  d.pmf = j.at("pmf").get<std::vector<double>>();
  d.truncated_mass = j.value("truncated_mass", 0.0);
  d.overflow_mass = j.value("overflow_mass", 0.0);
  return d;
}

/// Two-column CSV: count,probability.
inline std::string to_csv(const CountDistribution& d) {
  std::ostringstream os;
  os.precision(17);
  os << "count,probability\n";
  for (std::size_t k = 0; k < d.pmf.size(); ++k) os << k << ',' << d.pmf[k] << '\n';
  return os.str();
}

}  // namespace reapnvm
