#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chain_model.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "occupancy.hpp"

namespace reapnvm {

/// Which operation count wears a cell out.
///  Combined: set + reset operations share one budget.
///  EitherExceeds: dead when either count alone exceeds the limit; set and
///    reset totals are treated as independent.
enum class LifetimeMode { SetOnly, ResetOnly, Combined, EitherExceeds };

inline std::string_view to_string(LifetimeMode m) {
  switch (m) {
    case LifetimeMode::SetOnly: return "set";
    case LifetimeMode::ResetOnly: return "reset";
    case LifetimeMode::Combined: return "combined";
    case LifetimeMode::EitherExceeds: return "either";
  }
  return "?";
}

inline LifetimeMode lifetime_mode_from_string(std::string_view s) {
  if (s == "set") return LifetimeMode::SetOnly;
  if (s == "reset") return LifetimeMode::ResetOnly;
  if (s == "combined") return LifetimeMode::Combined;
  if (s == "either") return LifetimeMode::EitherExceeds;
  throw ValidationError("unknown lifetime mode '" + std::string(s) + "' (set|reset|combined|either)");
}

struct LifetimeParams {
  std::int64_t endurance_limit = 1000;  // cycles
  std::int64_t cell_count = 256;
  double dead_fraction = 0.15;
  LifetimeMode mode = LifetimeMode::SetOnly;
};

inline std::vector<std::string> validate(const LifetimeParams& p) {
  std::vector<std::string> out;
  if (p.endurance_limit < 1) out.emplace_back("endurance_limit must be >= 1");
  if (p.cell_count < 1) out.emplace_back("cell_count must be >= 1");
  if (!(p.dead_fraction > 0.0 && p.dead_fraction < 1.0)) out.emplace_back("dead_fraction must be in (0, 1)");
  return out;
}

// ---------------------------------------------------------------------------
// Capped convolution

/// Folds every count above `cap` into overflow_mass and pads pmf to cap + 1
/// entries when anything overflowed.
inline CountDistribution cap_distribution(CountDistribution d, std::size_t cap) {
  if (d.pmf.size() > cap + 1) {
    for (std::size_t k = cap + 1; k < d.pmf.size(); ++k) d.overflow_mass += d.pmf[k];
    d.pmf.resize(cap + 1);
  }
  if (d.overflow_mass > 0.0) d.pmf.resize(cap + 1, 0.0);
  return d;
}

/// Distribution of X + Y for independent X ~ a, Y ~ b, with counts above
/// `cap` collapsed into overflow_mass. Inputs must already be capped.
inline CountDistribution convolve_capped(const CountDistribution& a, const CountDistribution& b, std::size_t cap) {
  CountDistribution out;
  const std::size_t la = a.pmf.size(), lb = b.pmf.size();
  const std::size_t len = std::min(la + lb - 1, cap + 1);
  out.pmf.assign(len, 0.0);
  for (std::size_t i = 0; i < la && i <= cap; ++i) {
    const double ai = a.pmf[i];
    if (ai == 0.0) continue;
    const std::size_t jmax = std::min(lb, cap + 1 - i);
    double* dst = out.pmf.data() + i;
    const double* src = b.pmf.data();
    for (std::size_t j = 0; j < jmax; ++j) dst[j] += ai * src[j];
  }
  // suffix[j] = sum_{j' >= j} b[j'], so pairs i + j > cap contribute
  // a[i] * suffix[cap + 1 - i].
  std::vector<double> suffix(lb + 1, 0.0);
  for (std::size_t j = lb; j-- > 0;) suffix[j] = suffix[j + 1] + b.pmf[j];
  double spill = 0.0;
  for (std::size_t i = 0; i < la; ++i) {
    const std::size_t first = i > cap ? 0 : cap + 1 - i;
    if (first < lb) spill += a.pmf[i] * suffix[first];
  }
  const double sa = a.stored_mass(), sb = suffix[0];
  out.overflow_mass = spill + a.overflow_mass * (sb + b.truncated_mass + b.overflow_mass) +
                      b.overflow_mass * (sa + a.truncated_mass);
  out.truncated_mass = a.truncated_mass * (sb + b.truncated_mass) + b.truncated_mass * sa;
  // Flush values that would otherwise decay into subnormals.
  for (auto& x : out.pmf)
    if (x != 0.0 && x < 1e-300) out.truncated_mass += x, x = 0.0;
  if (out.overflow_mass > 0.0) out.pmf.resize(cap + 1, 0.0);
  return out;
}

/// n-fold sums of one per-challenge distribution, by binary doubling. Powers
/// d^(2^k) are cached, so evaluating many n costs O(log n) convolutions each.
class NFoldSum {
 public:
  NFoldSum(CountDistribution per_challenge, std::size_t cap) : cap_(cap) {
    powers_.push_back(cap_distribution(std::move(per_challenge), cap));
  }

  CountDistribution operator()(std::uint64_t n) {
    CountDistribution acc = CountDistribution::point_mass(0);
    for (std::size_t bit = 0; n != 0; ++bit, n >>= 1) {
      if ((n & 1U) == 0) continue;
      acc = convolve_capped(acc, power(bit), cap_);
    }
    return acc;
  }

  std::size_t cap() const noexcept { return cap_; }

 private:
  const CountDistribution& power(std::size_t bit) {
    while (powers_.size() <= bit) powers_.push_back(convolve_capped(powers_.back(), powers_.back(), cap_));
    return powers_[bit];
  }

  std::size_t cap_;
  std::vector<CountDistribution> powers_;
};

/// Distribution of the total over `n` i.i.d. challenges, capped at `cap`.
inline CountDistribution total_ops_after_n(const CountDistribution& per_challenge, std::uint64_t n, std::size_t cap) {
  return NFoldSum(per_challenge, cap)(n);
}

/// P(count > limit). Overflow mass counts as dead, so the cap must not be
/// below the limit once anything overflowed.
inline double cell_dead_prob(const CountDistribution& total, std::int64_t limit) {
  if (limit < 0) throw ValidationError("limit must be nonnegative");
  const auto lim = static_cast<std::size_t>(limit);
  if (total.overflow_mass > 0.0 && lim + 1 > total.pmf.size())
    throw ValidationError("distribution cap is below the endurance limit");
  double p = total.overflow_mass;
  for (std::size_t k = lim + 1; k < total.pmf.size(); ++k) p += total.pmf[k];
  return std::clamp(p, 0.0, 1.0);
}

/// Largest dead-cell count that still leaves the PUF alive.
inline std::int64_t dead_cell_threshold(const LifetimeParams& p) {
  return static_cast<std::int64_t>(std::floor(p.dead_fraction * static_cast<double>(p.cell_count) + 1e-9));
}

/// P(more than dead_fraction * M of M independent cells are dead), summed in
/// log space.
inline double puf_dead_prob(double p_cell, const LifetimeParams& params) {
  if (!(p_cell >= 0.0 && p_cell <= 1.0)) throw ValidationError("p_cell must be a probability");
  const auto m = params.cell_count;
  const auto thr = dead_cell_threshold(params);
  if (thr >= m) return 0.0;
  if (p_cell == 0.0) return 0.0;
  if (p_cell == 1.0) return 1.0;
  const double lp = std::log(p_cell), lq = std::log1p(-p_cell);
  const double lgm = std::lgamma(static_cast<double>(m) + 1.0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m) + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k <= m; ++k) {
    const double kk = static_cast<double>(k), rest = static_cast<double>(m - k);
    const double t = lgm - std::lgamma(kk + 1.0) - std::lgamma(rest + 1.0) + kk * lp + rest * lq;
    terms.push_back(t);
    top = std::max(top, t);
  }
  // Both tails share one scale; dividing by their sum removes the lgamma
  // rounding and gives exactly 1 once the lower tail underflows.
  double lower = 0.0, upper = 0.0;
  for (std::int64_t k = 0; k <= m; ++k) (k > thr ? upper : lower) += std::exp(terms[static_cast<std::size_t>(k)] - top);
  return std::clamp(upper / (upper + lower), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Lifetime curves

/// P(PUF dead | N challenges) for one chain and parameter set.
class LifetimeModel {
 public:
  LifetimeModel(const PerChallengeOps& ops, LifetimeParams params)
      : params_(params),
        primary_(pick(ops, params.mode), cap(params)),
        reset_(ops.reset_dist, cap(params)) {
    auto v = validate(params);
    if (!v.empty()) throw ValidationError("invalid lifetime parameters:", std::move(v));
  }

  LifetimeModel(const MarkovChainSpec& chain, LifetimeParams params, double epsilon = kDefaultEpsilon)
      : LifetimeModel(per_challenge_ops(chain, epsilon), params) {}

  double p_cell(std::uint64_t n) {
    const double p = cell_dead_prob(primary_(n), params_.endurance_limit);
    if (params_.mode != LifetimeMode::EitherExceeds) return p;
    const double r = cell_dead_prob(reset_(n), params_.endurance_limit);
    return 1.0 - (1.0 - p) * (1.0 - r);
  }

  double p_dead(std::uint64_t n) { return puf_dead_prob(p_cell(n), params_); }

  const LifetimeParams& params() const noexcept { return params_; }

 private:
  static std::size_t cap(const LifetimeParams& p) { return static_cast<std::size_t>(p.endurance_limit); }
  static const CountDistribution& pick(const PerChallengeOps& ops, LifetimeMode m) {
    switch (m) {
      case LifetimeMode::ResetOnly: return ops.reset_dist;
      case LifetimeMode::Combined: return ops.combined_dist;
      default: return ops.set_dist;
    }
  }

  LifetimeParams params_;
  NFoldSum primary_;
  NFoldSum reset_;
};

struct LifetimeCurve {
  std::vector<std::uint64_t> challenge_grid;
  std::vector<double> p_dead;
  LifetimeParams params;
};

/// Geometric grid (ratio 1.2) of integer challenge counts from 1 to 10^7.
inline std::vector<std::uint64_t> default_grid(double factor = 1.2, std::uint64_t last = 10'000'000) {
  std::vector<std::uint64_t> grid;
  for (double x = 1.0; x <= static_cast<double>(last) * (1.0 + 1e-12); x *= factor) {
    const auto n = static_cast<std::uint64_t>(std::llround(x));
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  if (grid.back() != last) grid.push_back(last);
  return grid;
}

inline LifetimeCurve lifetime_curve(LifetimeModel& model, const std::vector<std::uint64_t>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0) throw ValidationError("challenge grid must start at 1 or later");
    if (i > 0 && grid[i] <= grid[i - 1]) throw ValidationError("challenge grid must be strictly increasing");
  }
  LifetimeCurve c{grid, {}, model.params()};
  c.p_dead.reserve(grid.size());
  for (auto n : grid) c.p_dead.push_back(model.p_dead(n));
  return c;
}

inline LifetimeCurve lifetime_curve(const MarkovChainSpec& chain, const LifetimeParams& params,
                                    const std::vector<std::uint64_t>& grid) {
  LifetimeModel model(chain, params);
  return lifetime_curve(model, grid);
}

/// Inserts grid points by integer bisection until the 0.5 crossing sits
/// between adjacent challenge counts. No-op when the curve never crosses.
inline void refine_crossing(LifetimeModel& model, LifetimeCurve& curve, double level = 0.5) {
  auto& g = curve.challenge_grid;
  auto& p = curve.p_dead;
  auto it = std::find_if(p.begin(), p.end(), [&](double x) { return x >= level; });
  if (it == p.end() || it == p.begin()) return;
  auto hi_idx = static_cast<std::size_t>(it - p.begin());
  std::uint64_t lo = g[hi_idx - 1], hi = g[hi_idx];
  std::vector<std::pair<std::uint64_t, double>> extra;
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    const double pm = model.p_dead(mid);
    extra.emplace_back(mid, pm);
    (pm >= level ? hi : lo) = mid;
  }
  for (auto [n, pn] : extra) {
    auto pos = std::lower_bound(g.begin(), g.end(), n);
    const auto idx = pos - g.begin();
    g.insert(pos, n);
    p.insert(p.begin() + idx, pn);
  }
}

/// Default grid plus refinement around the half-life.
inline LifetimeCurve lifetime_curve(const MarkovChainSpec& chain, const LifetimeParams& params) {
  LifetimeModel model(chain, params);
  auto curve = lifetime_curve(model, default_grid());
  refine_crossing(model, curve);
  return curve;
}

/// First point where the curve, interpolated linearly in log N, reaches 0.5.
inline double half_life(const LifetimeCurve& curve) {
  const auto& g = curve.challenge_grid;
  const auto& p = curve.p_dead;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.5) continue;
    if (i == 0) return static_cast<double>(g[0]);
    const double l0 = std::log(static_cast<double>(g[i - 1])), l1 = std::log(static_cast<double>(g[i]));
    const double f = (0.5 - p[i - 1]) / (p[i] - p[i - 1]);
    return std::exp(l0 + f * (l1 - l0));
  }
  throw ConvergenceError("lifetime curve never reaches 0.5 on its grid; extend the grid");
}

/// Smallest integer N with P(PUF dead | N) >= 0.5.
inline std::uint64_t half_life_exact(LifetimeModel& model, std::uint64_t max_n = std::uint64_t{1} << 40) {
  std::uint64_t hi = 1;
  while (model.p_dead(hi) < 0.5) {
    if (hi >= max_n) throw ConvergenceError("P(PUF dead) stays below 0.5 up to " + std::to_string(max_n));
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // p_dead(lo) < 0.5, or lo == 0
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    (model.p_dead(mid) >= 0.5 ? hi : lo) = mid;
  }
  return hi;
}

inline std::uint64_t half_life_exact(const MarkovChainSpec& chain, const LifetimeParams& params) {
  LifetimeModel model(chain, params);
  return half_life_exact(model);
}

struct Calibration {
  double knob = 0.0;
  std::uint64_t half_life = 0;
};

/// Bisects a scalar chain parameter in [lo, hi] until the exact half-life
/// matches `target`. The half-life must be monotone in the knob and the
/// target must lie between the half-lives at the two ends.
inline Calibration calibrate_half_life(const std::function<MarkovChainSpec(double)>& make_chain,
                                       const LifetimeParams& params, std::uint64_t target, double lo, double hi,
                                       int max_steps = 60) {
  auto eval = [&](double knob) { return half_life_exact(make_chain(knob), params); };
  auto h_lo = eval(lo), h_hi = eval(hi);
  if (target < std::min(h_lo, h_hi) || target > std::max(h_lo, h_hi))
    throw ConvergenceError("calibration target " + std::to_string(target) + " not bracketed by half-lives " +
                           std::to_string(h_lo) + " and " + std::to_string(h_hi));
  const bool decreasing = h_lo > h_hi;
  auto dist = [&](std::uint64_t h) { return h > target ? h - target : target - h; };
  Calibration best = dist(h_lo) <= dist(h_hi) ? Calibration{lo, h_lo} : Calibration{hi, h_hi};
  for (int i = 0; i < max_steps && best.half_life != target; ++i) {
    const double mid = 0.5 * (lo + hi);
    const auto h = eval(mid);
    if (dist(h) < dist(best.half_life)) best = {mid, h};
    const bool raise_knob = decreasing ? h > target : h < target;
    (raise_knob ? lo : hi) = mid;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Export

inline std::string to_csv(const LifetimeCurve& c) {
  std::ostringstream os;
  os.precision(17);
  os << "challenges,p_dead\n";
  for (std::size_t i = 0; i < c.challenge_grid.size(); ++i) os << c.challenge_grid[i] << ',' << c.p_dead[i] << '\n';
  return os.str();
}

inline nlohmann::ordered_json to_json(const LifetimeCurve& c) {
  nlohmann::ordered_json j;
  j["params"] = {{"endurance_limit", c.params.endurance_limit},
                 {"cell_count", c.params.cell_count},
                 {"dead_fraction", c.params.dead_fraction},
                 {"mode", std::string(to_string(c.params.mode))}};
  j["challenges"] = c.challenge_grid;
  j["p_dead"] = c.p_dead;
  return j;
}

}  // namespace reapnvm
