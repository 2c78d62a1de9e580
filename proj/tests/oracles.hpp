#pragma once

// Independent reference computations used to check the library. None of
// these call into the code under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <reapnvm/chain_model.hpp>

namespace oracle {

/// Binomial(n, p) pmf via the multiplicative recurrence on k.
inline std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  // Work in logs so n = 1000 does not underflow at the ends.
  for (int k = 0; k <= n; ++k) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    pmf[static_cast<std::size_t>(k)] = std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
  }
  return pmf;
}

/// Direct double-loop convolution, no capping.
inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline std::vector<double> naive_nfold(const std::vector<double>& pmf, int n) {
  std::vector<double> acc{1.0};
  for (int i = 0; i < n; ++i) acc = convolve(acc, pmf);
  return acc;
}

/// Brute-force binomial tail P(K > thr) by summing exact binomial
/// coefficients term by term.
inline double binomial_tail(int m, double p, int thr) {
  double total = 0.0;
  for (int k = thr + 1; k <= m; ++k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (m - k + i) / i;
    total += c * std::pow(p, k) * std::pow(1.0 - p, m - k);
  }
  return total;
}

/// Random absorbing chain with `n_states` states (the last one terminal),
/// random sparse rows and random Set/Reset tags on transient states.
inline reapnvm::MarkovChainSpec random_chain(std::uint64_t seed, std::size_t n_states) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  reapnvm::MarkovChainSpec c;
  const std::size_t term = n_states - 1;
  for (std::size_t i = 0; i < n_states; ++i) {
    reapnvm::OpTag tag = reapnvm::OpTag::None;
    if (i != term && i != 0) tag = (rng() % 2) ? reapnvm::OpTag::Set : reapnvm::OpTag::Reset;
    if (i == 0 && rng() % 3 == 0) tag = reapnvm::OpTag::Set;
    c.states.push_back({i, "s" + std::to_string(i), tag});
  }
  c.transition.assign(n_states * n_states, 0.0);
  for (std::size_t i = 0; i < term; ++i) {
    std::vector<double> w(n_states, 0.0);
    for (std::size_t j = 0; j < n_states; ++j)
      if (u(rng) >= 0.55) w[j] = u(rng);
    // Guarantee an exit so absorption is certain.
    w[term] += 0.15 + 0.3 * u(rng);
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t j = 0; j < n_states; ++j) c.transition[i * n_states + j] = w[j] / total;
  }
  c.transition[term * n_states + term] = 1.0;
  c.initial = 0;
  c.terminal = {term};
  return c;
}

}  // namespace oracle
