#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "puf_sim.hpp"
#include "rng.hpp"

namespace reapnvm {

enum class AttackSource { Apuf, ReapNvm };

inline std::string_view to_string(AttackSource s) { return s == AttackSource::Apuf ? "apuf" : "reap-nvm"; }

inline constexpr std::size_t kParityFeatures = kStages + 1;  // + bias

inline std::size_t feature_width(AttackSource s) {
  return s == AttackSource::Apuf ? kParityFeatures : kParityFeatures + kPairs + 1;
}

/// Parity transform: feature k = prod_{i >= k} (1 - 2 bit_i), plus a constant
/// bias feature. For REAP-NVM the pair index (one-hot) and the level (scaled
/// to [0, 1]) are appended so the attacker sees the whole challenge.
inline std::vector<double> featurize(const Challenge& c, AttackSource source = AttackSource::Apuf) {
  std::vector<double> f(feature_width(source), 0.0);
  double prod = 1.0;
  for (int k = kStages - 1; k >= 0; --k) {
    prod *= c.bit(k) ? -1.0 : 1.0;
    f[k] = prod;
  }
  f[kStages] = 1.0;
  if (source == AttackSource::ReapNvm) {
    f[kParityFeatures + c.pair_index] = 1.0;
    f[kParityFeatures + kPairs] = static_cast<double>(c.level) / (kLevels - 1);
  }
  return f;
}

/// CRPs in a compact feature encoding: parity signs as int8 plus the raw
/// pair/level fields. Row i expands to featurize(challenge_i, source).
struct AttackDataset {
  AttackSource source = AttackSource::Apuf;
  std::vector<std::int8_t> parity;  // size() * kParityFeatures
  std::vector<std::uint8_t> pair;
  std::vector<std::uint8_t> level;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }

  std::vector<double> features(std::size_t i) const {
    std::vector<double> f(feature_width(source), 0.0);
    for (std::size_t k = 0; k < kParityFeatures; ++k) f[k] = parity[i * kParityFeatures + k];
    if (source == AttackSource::ReapNvm) {
      f[kParityFeatures + pair[i]] = 1.0;
      f[kParityFeatures + kPairs] = static_cast<double>(level[i]) / (kLevels - 1);
    }
    return f;
  }
};

inline AttackDataset make_attack_dataset(const std::vector<CrpRecord>& crps, AttackSource source) {
  AttackDataset ds;
  ds.source = source;
  ds.parity.reserve(crps.size() * kParityFeatures);
  for (const auto& r : crps) {
    const auto f = featurize(r.challenge, AttackSource::Apuf);
    for (double x : f) ds.parity.push_back(static_cast<std::int8_t>(x));
    ds.pair.push_back(r.challenge.pair_index);
    ds.level.push_back(r.challenge.level);
    ds.labels.push_back(r.response);
  }
  return ds;
}

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t batch_size = 128;
  int max_epochs = 200;
  /// Stop once the mean training loss changes less than this over an epoch.
  double loss_tolerance = 1e-5;
};

class LogisticModel {
 public:
  LogisticModel() = default;
  explicit LogisticModel(AttackSource s) : source_(s), w_(feature_width(s), 0.0) {}

  double logit(const AttackDataset& ds, std::size_t i) const {
    const std::int8_t* x = &ds.parity[i * kParityFeatures];
    double z = 0.0;
    for (std::size_t k = 0; k < kParityFeatures; ++k) z += w_[k] * x[k];
    if (source_ == AttackSource::ReapNvm)
      z += w_[kParityFeatures + ds.pair[i]] + w_[kParityFeatures + kPairs] * level_scale(ds.level[i]);
    return z;
  }

  std::uint8_t predict(const AttackDataset& ds, std::size_t i) const { return logit(ds, i) > 0.0 ? 1 : 0; }

  /// w -= step * sum over the batch of g_i * x_i.
  void apply(const AttackDataset& ds, std::size_t i, double coeff) {
    const std::int8_t* x = &ds.parity[i * kParityFeatures];
    for (std::size_t k = 0; k < kParityFeatures; ++k) w_[k] -= coeff * x[k];
    if (source_ == AttackSource::ReapNvm) {
      w_[kParityFeatures + ds.pair[i]] -= coeff;
      w_[kParityFeatures + kPairs] -= coeff * level_scale(ds.level[i]);
    }
  }

  const std::vector<double>& weights() const noexcept { return w_; }

 private:
  static double level_scale(std::uint8_t l) { return static_cast<double>(l) / (kLevels - 1); }

  AttackSource source_ = AttackSource::Apuf;
  std::vector<double> w_;
};

struct AttackResult {
  AttackSource source = AttackSource::Apuf;
  std::size_t train_size = 0;
  double test_accuracy = 0.0;
  double train_accuracy = 0.0;
  int epochs = 0;
  std::uint64_t seed = 0;
};

struct TrainOutcome {
  LogisticModel model;
  AttackResult result;
};

inline double accuracy(const LogisticModel& m, const AttackDataset& ds, std::size_t begin, std::size_t end) {
  std::size_t hits = 0;
  for (std::size_t i = begin; i < end; ++i) hits += m.predict(ds, i) == ds.labels[i];
  return end > begin ? static_cast<double>(hits) / static_cast<double>(end - begin) : 0.0;
}

/// Default held-out split: the last 20% of the dataset.
inline std::size_t default_test_size(std::size_t n) { return n / 5; }

/// Trains on records [0, train_size) and tests on the last `test_size`
/// records. Mini-batch gradient descent on the log-loss; batches are drawn
/// from a seeded shuffle of the training split.
inline TrainOutcome train(const AttackDataset& ds, std::size_t train_size, std::uint64_t seed,
                          std::size_t test_size = 0, const TrainConfig& cfg = {}) {
  if (test_size == 0) test_size = default_test_size(ds.size());
  if (train_size == 0 || test_size == 0 || train_size + test_size > ds.size())
    throw ValidationError("insufficient data: " + std::to_string(ds.size()) + " records for " +
                          std::to_string(train_size) + " training + " + std::to_string(test_size) + " test");
  LogisticModel model(ds.source);
  std::vector<std::size_t> order(train_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double prev_loss = std::numeric_limits<double>::infinity();
  int epoch = 0;
  std::vector<double> g;
  while (epoch < cfg.max_epochs) {
    CounterRng rng(seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = train_size; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double loss = 0.0;
    for (std::size_t start = 0; start < train_size; start += cfg.batch_size) {
      const std::size_t end = std::min(train_size, start + cfg.batch_size);
      g.assign(end - start, 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto i = order[b];
        const double z = model.logit(ds, i);
        const double y = ds.labels[i];
        // log(1 + e^z) - y z, computed without overflow.
        loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
        g[b - start] = 1.0 / (1.0 + std::exp(-z)) - y;
      }
      const double step = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) model.apply(ds, order[b], step * g[b - start]);
    }
    loss /= static_cast<double>(train_size);
    ++epoch;
    if (std::abs(prev_loss - loss) < cfg.loss_tolerance) break;
    prev_loss = loss;
  }
  AttackResult r;
  r.source = ds.source;
  r.train_size = train_size;
  r.seed = seed;
  r.epochs = epoch;
  r.train_accuracy = accuracy(model, ds, 0, train_size);
  r.test_accuracy = accuracy(model, ds, ds.size() - test_size, ds.size());
  return {std::move(model), r};
}

/// One model per training size. Every size gets its own seed and the same
/// held-out tail.
inline std::vector<AttackResult> attack_curve(const AttackDataset& ds, const std::vector<std::size_t>& sizes,
                                              std::uint64_t seed, std::size_t test_size = 0,
                                              const TrainConfig& cfg = {}) {
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw ValidationError("training sizes must be increasing");
  std::vector<AttackResult> out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out.push_back(train(ds, sizes[i], mix64(seed ^ i), test_size, cfg).result);
  return out;
}

inline std::string curve_csv(const std::vector<AttackResult>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "source,train_size,accuracy,seed\n";
  for (const auto& r : rows) os << to_string(r.source) << ',' << r.train_size << ',' << r.test_accuracy << ',' << r.seed << '\n';
  return os.str();
}

}  // namespace reapnvm
