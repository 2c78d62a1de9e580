#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "chain_model.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace reapnvm {

/// probs[t][s]: probability the chain is in state s at iteration t.
struct StateOccupancy {
  std::vector<std::vector<double>> probs;
  std::size_t converged_at = 0;

  double terminal_mass(const MarkovChainSpec& chain, std::size_t t) const {
    double m = 0.0;
    for (auto s : chain.terminal) m += probs[t][s];
    return m;
  }

  double group_mass(std::span<const std::size_t> group, std::size_t t) const {
    double m = 0.0;
    for (auto s : group) m += probs[t][s];
    return m;
  }
};

inline constexpr double kDefaultEpsilon = 1e-5;
inline constexpr std::size_t kDefaultMaxIters = 1'000'000;

namespace detail {
inline void step(const MarkovChainSpec& chain, std::span<const double> in, std::span<double> out) {
  const auto n = chain.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = in[i];
    if (p == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out[j] += p * chain.prob(i, j);
  }
}
}  // namespace detail

/// Propagates the one-hot initial vector until the terminal states hold at
/// least 1 - epsilon of the mass.
inline StateOccupancy evolve(const MarkovChainSpec& chain, double epsilon = kDefaultEpsilon,
                             std::size_t max_iters = kDefaultMaxIters) {
  require_valid(chain);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must be in (0, 1)");
  StateOccupancy occ;
  std::vector<double> row(chain.size(), 0.0);
  row[chain.initial] = 1.0;
  occ.probs.push_back(row);
  for (std::size_t t = 0;; ++t) {
    if (occ.terminal_mass(chain, t) >= 1.0 - epsilon) {
      occ.converged_at = t;
      return occ;
    }
    if (t == max_iters)
      throw ConvergenceError("chain did not converge within " + std::to_string(max_iters) + " iterations");
    std::vector<double> next(chain.size());
    detail::step(chain, occ.probs.back(), next);
    occ.probs.push_back(std::move(next));
  }
}

/// How visit counts are accumulated.
///  Joint: carries the (state, count) joint mass through the evolution. The
///    "count just reached N" term is the exact joint probability of being in
///    the group with N-1 prior visits. Exact.
///  Factorized: the literal product form, which multiplies the marginal count
///    distribution by the marginal visit probability. Exact only when the
///    per-iteration visits are independent (e.g. deterministic paths); it
///    misestimates self-loops.
enum class VisitRecursion { Joint, Factorized };

namespace detail {
inline std::vector<bool> group_mask(const MarkovChainSpec& chain, std::span<const std::size_t> group) {
  if (group.empty()) throw ValidationError("state group is empty");
  std::vector<bool> mask(chain.size(), false);
  for (auto s : group) {
    if (s >= chain.size()) throw ValidationError("state " + std::to_string(s) + " not in chain");
    if (chain.is_terminal(s)) throw ValidationError("state " + std::to_string(s) + " is terminal");
    mask[s] = true;
  }
  return mask;
}
}  // namespace detail

/// Distribution of the number of visits to any state of `group` over
/// iterations 0..converged_at. Group members are mutually exclusive per
/// iteration, so the group acts as one event.
inline CountDistribution visit_count_distribution(const MarkovChainSpec& chain, const StateOccupancy& occ,
                                                  std::span<const std::size_t> group,
                                                  VisitRecursion method = VisitRecursion::Joint) {
  const auto mask = detail::group_mask(chain, group);
  const std::size_t horizon = occ.converged_at + 1;  // iterations counted
  CountDistribution out;

  if (method == VisitRecursion::Factorized) {
    std::vector<double> pc{1.0};
    for (std::size_t t = 1; t <= horizon; ++t) {
      const double pm = occ.group_mass(group, t - 1);
      std::vector<double> next(pc.size() + 1, 0.0);
      for (std::size_t n = 0; n < pc.size(); ++n) {
        next[n] += pc[n] * (1.0 - pm);  // keep
        next[n + 1] += pc[n] * pm;      // one more visit
      }
      if (next.back() == 0.0) next.pop_back();
      pc = std::move(next);
    }
    out.pmf = std::move(pc);
    out.trim_tail();
    return out;
  }

  const auto s_count = chain.size();
  // joint[s][n]: P(state s at iteration t, n visits during 0..t-1).
  std::vector<std::vector<double>> joint(s_count);
  joint[chain.initial] = {1.0};
  std::vector<double> absorbed;  // count distribution of mass already in terminal states
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<std::vector<double>> next(s_count);
    for (std::size_t i = 0; i < s_count; ++i) {
      const auto& src = joint[i];
      if (src.empty()) continue;
      const std::size_t shift = mask[i] ? 1 : 0;
      for (std::size_t j = 0; j < s_count; ++j) {
        const double p = chain.prob(i, j);
        if (p == 0.0) continue;
        auto& dst = next[j];
        if (dst.size() < src.size() + shift) dst.resize(src.size() + shift, 0.0);
        for (std::size_t n = 0; n < src.size(); ++n) dst[n + shift] += src[n] * p;
      }
    }
    joint = std::move(next);
    // Terminal states are absorbing and untagged: fold their mass out so the
    // per-step work only covers transient states.
    for (auto term : chain.terminal) {
      auto& v = joint[term];
      if (absorbed.size() < v.size()) absorbed.resize(v.size(), 0.0);
      for (std::size_t n = 0; n < v.size(); ++n) absorbed[n] += v[n];
      v.clear();
    }
  }
  for (const auto& v : joint) {
    if (absorbed.size() < v.size()) absorbed.resize(v.size(), 0.0);
    for (std::size_t n = 0; n < v.size(); ++n) absorbed[n] += v[n];
  }
  if (absorbed.empty()) absorbed = {1.0};
  out.pmf = std::move(absorbed);
  out.trim_tail();
  return out;
}

struct PerChallengeOps {
  CountDistribution set_dist;
  CountDistribution reset_dist;
  /// Set and reset operations together, from the union group (exact sum of
  /// the two dependent per-challenge counts).
  CountDistribution combined_dist;
};

inline PerChallengeOps per_challenge_ops(const MarkovChainSpec& chain, double epsilon = kDefaultEpsilon,
                                         VisitRecursion method = VisitRecursion::Joint) {
  const auto set = chain.states_tagged(OpTag::Set);
  const auto reset = chain.states_tagged(OpTag::Reset);
  if (set.empty() && reset.empty()) throw ValidationError("chain has no set- or reset-tagged states");
  const auto occ = evolve(chain, epsilon);
  auto dist_for = [&](const std::vector<std::size_t>& g) {
    return g.empty() ? CountDistribution::point_mass(0) : visit_count_distribution(chain, occ, g, method);
  };
  std::vector<std::size_t> both = set;
  both.insert(both.end(), reset.begin(), reset.end());
  return {dist_for(set), dist_for(reset), dist_for(both)};
}

/// Monte Carlo oracle: runs `n` trajectories to absorption and histograms the
/// set/reset visit counts. Trajectory i draws from its own counter-based
/// substream, so the result does not depend on `threads`.
inline PerChallengeOps sample_trajectories(const MarkovChainSpec& chain, std::uint64_t n, std::uint64_t seed,
                                           unsigned threads = 0) {
  require_valid(chain);
  if (n == 0) throw ValidationError("need at least one trajectory");
  const auto s_count = chain.size();
  std::vector<double> cdf(s_count * s_count);
  for (std::size_t i = 0; i < s_count; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s_count; ++j) cdf[i * s_count + j] = acc += chain.prob(i, j);
  }
  std::vector<bool> terminal(s_count, false);
  for (auto t : chain.terminal) terminal[t] = true;

  using Hist = std::vector<std::uint64_t>;
  struct Counts {
    Hist set, reset, both;
  };
  auto bump = [](Hist& h, std::size_t k) {
    if (h.size() <= k) h.resize(k + 1, 0);
    ++h[k];
  };
  const CounterRng root(seed);
  auto run = [&](std::uint64_t begin, std::uint64_t end, Counts& c) {
    for (std::uint64_t i = begin; i < end; ++i) {
      auto rng = root.substream(i);
      std::size_t s = chain.initial, sets = 0, resets = 0;
      while (!terminal[s]) {
        const auto tag = chain.states[s].op_tag;
        sets += tag == OpTag::Set;
        resets += tag == OpTag::Reset;
        const double u = rng.uniform();
        const double* row = &cdf[s * s_count];
        std::size_t j = 0;
        while (j + 1 < s_count && u >= row[j]) ++j;
        // Rounding can leave row[S-1] a hair below 1; never pick a zero entry.
        while (chain.prob(s, j) == 0.0) --j;
        s = j;
      }
      bump(c.set, sets);
      bump(c.reset, resets);
      bump(c.both, sets + resets);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
  std::vector<Counts> partial(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w)
    pool.emplace_back(run, n * w / threads, n * (w + 1) / threads, std::ref(partial[w]));
  run(0, n / threads, partial[0]);
  for (auto& th : pool) th.join();

  auto to_dist = [&](Hist Counts::*field) {
    Hist total;
    for (auto& c : partial) {
      const auto& h = c.*field;
      if (total.size() < h.size()) total.resize(h.size(), 0);
      for (std::size_t k = 0; k < h.size(); ++k) total[k] += h[k];
    }
    CountDistribution d;
    for (auto x : total) d.pmf.push_back(static_cast<double>(x) / static_cast<double>(n));
    return d;
  };
  return {to_dist(&Counts::set), to_dist(&Counts::reset), to_dist(&Counts::both)};
}

}  // namespace reapnvm
