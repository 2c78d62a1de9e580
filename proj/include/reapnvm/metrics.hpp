#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace reapnvm {

/// Fixed-width response word. Bit i is the i-th packed single-bit response.
class ResponseWord {
 public:
  ResponseWord() = default;
  explicit ResponseWord(std::size_t width) : width_(width), limbs_((width + 63) / 64, 0) {}

  std::size_t width() const noexcept { return width_; }

  bool get(std::size_t i) const { return (limbs_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool v) {
    const auto mask = std::uint64_t{1} << (i % 64);
    limbs_[i / 64] = v ? (limbs_[i / 64] | mask) : (limbs_[i / 64] & ~mask);
  }

  std::size_t weight() const {
    std::size_t w = 0;
    for (auto x : limbs_) w += static_cast<std::size_t>(std::popcount(x));
    return w;
  }

  ResponseWord operator~() const {
    ResponseWord r(width_);
    for (std::size_t i = 0; i < width_; ++i) r.set(i, !get(i));
    return r;
  }

  friend std::size_t hamming_distance(const ResponseWord& a, const ResponseWord& b) {
    if (a.width_ != b.width_) throw ValidationError("response widths differ");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) d += static_cast<std::size_t>(std::popcount(a.limbs_[i] ^ b.limbs_[i]));
    return d;
  }

  friend bool operator==(const ResponseWord&, const ResponseWord&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<std::uint64_t> limbs_;
};

struct ResponseSet {
  std::vector<ResponseWord> words;
  std::size_t width = 0;
  /// Trailing single-bit responses that did not fill a word.
  std::size_t dropped = 0;
};

/// Packs consecutive groups of m bits into words, in generation order.
inline ResponseSet pack(std::span<const std::uint8_t> bits, std::size_t m = 128) {
  if (bits.empty()) throw ValidationError("no responses to pack");
  if (m == 0) throw ValidationError("word width must be >= 1");
  ResponseSet rs;
  rs.width = m;
  const std::size_t n_words = bits.size() / m;
  rs.dropped = bits.size() - n_words * m;
  rs.words.reserve(n_words);
  for (std::size_t w = 0; w < n_words; ++w) {
    ResponseWord word(m);
    for (std::size_t i = 0; i < m; ++i) word.set(i, bits[w * m + i] != 0);
    rs.words.push_back(std::move(word));
  }
  return rs;
}

/// Percent agreement of repeated measurements with a reference response.
inline double reliability(const ResponseWord& reference, std::span<const ResponseWord> repeats) {
  if (repeats.empty()) throw ValidationError("reliability needs at least one repeat");
  double acc = 0.0;
  for (const auto& r : repeats)
    acc += static_cast<double>(hamming_distance(reference, r)) / static_cast<double>(reference.width());
  return 100.0 * (1.0 - acc / static_cast<double>(repeats.size()));
}

/// Percent of ones.
inline double uniformity(const ResponseWord& w) {
  if (w.width() == 0) throw ValidationError("empty response word");
  return 100.0 * static_cast<double>(w.weight()) / static_cast<double>(w.width());
}

/// Mean pairwise normalized Hamming distance, in percent, across devices
/// answering the same challenge.
inline double uniqueness(std::span<const ResponseWord> per_device) {
  const std::size_t n = per_device.size();
  if (n < 2) throw ValidationError("uniqueness needs at least two devices");
  const double m = static_cast<double>(per_device[0].width());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) acc += static_cast<double>(hamming_distance(per_device[i], per_device[j])) / m;
  return 100.0 * 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * acc;
}

/// Hamming weight of every word.
inline std::vector<std::size_t> weights(const ResponseSet& rs) {
  std::vector<std::size_t> out;
  out.reserve(rs.words.size());
  for (const auto& w : rs.words) out.push_back(w.weight());
  return out;
}

/// Word-by-word Hamming distance between two devices' response sets.
inline std::vector<std::size_t> pairwise_distances(const ResponseSet& a, const ResponseSet& b) {
  if (a.words.size() != b.words.size()) throw ValidationError("response sets differ in length");
  std::vector<std::size_t> out;
  out.reserve(a.words.size());
  for (std::size_t i = 0; i < a.words.size(); ++i) out.push_back(hamming_distance(a.words[i], b.words[i]));
  return out;
}

/// counts[b] = number of values equal to b, for b in 0..max_bin.
inline std::vector<std::size_t> histogram(std::span<const std::size_t> values, std::size_t max_bin) {
  std::vector<std::size_t> counts(max_bin + 1, 0);
  for (auto v : values) {
    if (v > max_bin) throw ValidationError("histogram value out of range");
    ++counts[v];
  }
  return counts;
}

inline double mean(std::span<const std::size_t> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (auto v : values) s += static_cast<double>(v);
  return s / static_cast<double>(values.size());
}

inline std::string histogram_csv(std::span<const std::size_t> counts) {
  std::ostringstream os;
  os << "bin,count\n";
  for (std::size_t b = 0; b < counts.size(); ++b) os << b << ',' << counts[b] << '\n';
  return os.str();
}

}  // namespace reapnvm
