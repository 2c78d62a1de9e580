#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace reapnvm {

inline constexpr int kStages = 128;
inline constexpr int kPairs = 128;
inline constexpr int kCells = 2 * kPairs;
inline constexpr int kLevels = 8;

/// One REAP-NVM challenge: 128 switch bits, a 7-bit pair index and a 3-bit
/// target level. Bit k of `switch_bits` drives stage k; words[0] holds bits
/// 0..63.
struct Challenge {
  std::array<std::uint64_t, 2> switch_bits{};
  std::uint8_t pair_index = 0;
  std::uint8_t level = 0;

  bool bit(int stage) const { return (switch_bits[stage >> 6] >> (stage & 63)) & 1U; }
  void flip(int stage) { switch_bits[stage >> 6] ^= std::uint64_t{1} << (stage & 63); }

  friend bool operator==(const Challenge&, const Challenge&) = default;
};

/// Pulses needed to program a cell to `level` from the reset state.
constexpr int pulses_for_level(int level) { return std::max(level, 1); }

/// 32 hex digits, most significant first (stage 127 is the top bit).
inline std::string switch_bits_to_hex(const Challenge& c) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(32, '0');
  for (int i = 0; i < 32; ++i) {
    const int nibble = 31 - i;
    const auto word = c.switch_bits[nibble / 16];
    s[i] = digits[(word >> (4 * (nibble % 16))) & 0xF];
  }
  return s;
}

inline std::array<std::uint64_t, 2> switch_bits_from_hex(std::string_view hex) {
  if (hex.size() != 32) throw ParseError("switch bits must be 32 hex digits");
  std::array<std::uint64_t, 2> w{};
  for (int i = 0; i < 32; ++i) {
    const char ch = hex[i];
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw ParseError(std::string("bad hex digit '") + ch + "'");
    const int nibble = 31 - i;
    w[nibble / 16] |= static_cast<std::uint64_t>(v) << (4 * (nibble % 16));
  }
  return w;
}

struct CrpRecord {
  Challenge challenge;
  std::uint8_t response = 0;

  friend bool operator==(const CrpRecord&, const CrpRecord&) = default;
};

/// Knobs of the behavioral delay model. Delays are in arbitrary, consistent
/// units; stage delays have standard deviation `variation_sigma`.
struct DeviceConfig {
  double variation_sigma = 1.0;
  double noise_sigma = 0.05;
  /// Minimum delay increase from one level to the next.
  double nvm_ramp = 1.0;
  /// Width of the per-cell, per-level excess delay, relative to
  /// variation_sigma. The default puts the differential delay of a programmed
  /// pair well above the spread of the summed stage delays (about 16 sigma),
  /// so the selected pair and level decide most responses.
  double nvm_variation = 300.0;
  /// Off for the plain arbiter PUF baseline.
  bool nvm_enabled = true;
  int default_level = 0;
};

/// A simulated device. Process variation is fixed at construction; wear
/// counters grow with every evaluation.
struct PufInstance {
  std::uint64_t seed = 0;
  DeviceConfig config;
  /// Per stage: {straight top, straight bottom, crossed top, crossed bottom}.
  std::vector<std::array<double, 4>> stage_deltas;
  /// Cell 2p sits on the top path after stage p, cell 2p+1 on the bottom.
  std::vector<std::array<double, kLevels>> nvm_delay;
  std::vector<std::uint64_t> set_count;
  std::vector<std::uint64_t> reset_count;
  std::optional<int> last_used_pair;
  std::uint64_t set_pulses_issued = 0;
  std::uint64_t reset_pulses_issued = 0;

  std::uint64_t noise_key() const { return mix64(seed ^ 0x6e6f697365ULL); }
};

inline PufInstance new_device(std::uint64_t seed, const DeviceConfig& cfg = {}) {
  if (!(cfg.variation_sigma >= 0.0) || !(cfg.noise_sigma >= 0.0) || !(cfg.nvm_variation >= 0.0))
    throw ValidationError("device sigmas must be nonnegative");
  if (!(cfg.nvm_ramp > 0.0)) throw ValidationError("nvm_ramp must be positive");
  if (cfg.default_level < 0 || cfg.default_level >= kLevels) throw ValidationError("default_level out of range");
  PufInstance d;
  d.seed = seed;
  d.config = cfg;
  CounterRng rng(seed, /*stream=*/0x64657669636500ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  d.stage_deltas.resize(kStages);
  for (auto& st : d.stage_deltas)
    for (auto& x : st) x = cfg.variation_sigma * gauss(rng);
  const double cell_sigma = cfg.nvm_variation * cfg.variation_sigma;
  d.nvm_delay.resize(kCells);
  for (auto& row : d.nvm_delay) {
    // The reset level behaves like an ordinary wire. Level l adds l steps of
    // (ramp + excess width) plus a cell-specific excess uniform in
    // [0, cell_sigma), so rows increase by at least nvm_ramp per level.
    row[0] = cfg.variation_sigma * gauss(rng);
    const double step = cfg.nvm_ramp + cell_sigma;
    for (int l = 1; l < kLevels; ++l) row[l] = row[0] + l * step + cell_sigma * rng.uniform();
  }
  d.set_count.assign(kCells, 0);
  d.reset_count.assign(kCells, 0);
  return d;
}

inline PufInstance new_device(std::uint64_t seed, double variation_sigma, double noise_sigma) {
  DeviceConfig cfg;
  cfg.variation_sigma = variation_sigma;
  cfg.noise_sigma = noise_sigma;
  return new_device(seed, cfg);
}

/// Arbiter delay difference (top minus bottom) for `c`, without noise or wear.
inline double delay_difference(const PufInstance& d, const Challenge& c) {
  double delta = 0.0;
  const bool nvm = d.config.nvm_enabled;
  const int def = d.config.default_level;
  for (int i = 0; i < kStages; ++i) {
    const auto& s = d.stage_deltas[i];
    delta = c.bit(i) ? -delta + (s[2] - s[3]) : delta + (s[0] - s[1]);
    if (nvm) {
      const int lvl = i == c.pair_index ? c.level : def;
      delta += d.nvm_delay[2 * i][lvl] - d.nvm_delay[2 * i + 1][lvl];
    }
  }
  return delta;
}

/// Programs the selected pair (resetting the previously used pair first) and
/// returns the arbiter decision. Only the selected pair is off its default
/// level during evaluation.
inline std::uint8_t eval(PufInstance& d, const Challenge& c, std::uint64_t noise_seed) {
  if (c.pair_index >= kPairs || c.level >= kLevels) throw ValidationError("challenge fields out of range");
  if (d.config.nvm_enabled) {
    if (d.last_used_pair && *d.last_used_pair != c.pair_index) {
      const int p = *d.last_used_pair;
      ++d.reset_count[2 * p];
      ++d.reset_count[2 * p + 1];
      d.reset_pulses_issued += 2;
    }
    const auto pulses = static_cast<std::uint64_t>(pulses_for_level(c.level));
    d.set_count[2 * c.pair_index] += pulses;
    d.set_count[2 * c.pair_index + 1] += pulses;
    d.set_pulses_issued += 2 * pulses;
    d.last_used_pair = c.pair_index;
  }
  double delta = delay_difference(d, c);
  if (d.config.noise_sigma > 0.0) {
    CounterRng rng(noise_seed, d.noise_key());
    delta += std::normal_distribution<double>(0.0, d.config.noise_sigma)(rng);
  }
  return delta > 0.0 ? 1 : 0;
}

/// Uniform random challenge. With `baseline` the pair/level fields are zero.
inline Challenge random_challenge(CounterRng& rng, bool baseline = false) {
  Challenge c;
  c.switch_bits = {rng(), rng()};
  if (!baseline) {
    c.pair_index = static_cast<std::uint8_t>(rng.below(kPairs));
    c.level = static_cast<std::uint8_t>(rng.below(kLevels));
  }
  return c;
}

/// Generates `n` CRPs in order, wearing the device. The challenge sequence
/// depends only on `seed`, so devices given the same seed see the same
/// challenges.
inline std::vector<CrpRecord> gen_crps(PufInstance& d, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("need at least one CRP");
  CounterRng rng(seed, /*stream=*/0x6368616cULL);
  const bool baseline = !d.config.nvm_enabled;
  std::vector<CrpRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = random_challenge(rng, baseline);
    out.push_back({c, eval(d, c, mix64(seed) ^ mix64(i))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string to_jsonl(const CrpRecord& r) {
  nlohmann::ordered_json j{{"c", switch_bits_to_hex(r.challenge)},
                           {"p", r.challenge.pair_index},
                           {"l", r.challenge.level},
                           {"r", r.response}};
  return j.dump();
}

inline std::string to_jsonl(const std::vector<CrpRecord>& v) {
  std::string out;
  for (const auto& r : v) out += to_jsonl(r) + '\n';
  return out;
}

inline CrpRecord crp_from_json(const nlohmann::json& j) {
  try {
    CrpRecord r;
    r.challenge.switch_bits = switch_bits_from_hex(j.at("c").get<std::string>());
    const int p = j.at("p").get<int>(), l = j.at("l").get<int>(), resp = j.at("r").get<int>();
    if (p < 0 || p >= kPairs || l < 0 || l >= kLevels || (resp != 0 && resp != 1))
      throw ParseError("CRP field out of range");
    r.challenge.pair_index = static_cast<std::uint8_t>(p);
    r.challenge.level = static_cast<std::uint8_t>(l);
    r.response = static_cast<std::uint8_t>(resp);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed CRP record: ") + e.what());
  }
}

inline std::vector<CrpRecord> crps_from_jsonl(std::string_view text) {
  std::vector<CrpRecord> out;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    const auto row = text.substr(pos, end - pos);
    pos = end + 1;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(crp_from_json(nlohmann::json::parse(row)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::ordered_json to_json(const DeviceConfig& c) {
  return {{"variation_sigma", c.variation_sigma}, {"noise_sigma", c.noise_sigma}, {"nvm_ramp", c.nvm_ramp},
          {"nvm_variation", c.nvm_variation},     {"nvm_enabled", c.nvm_enabled}, {"default_level", c.default_level}};
}

inline DeviceConfig device_config_from_json(const nlohmann::json& j, DeviceConfig c = {}) {
  c.variation_sigma = j.value("variation_sigma", c.variation_sigma);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.nvm_ramp = j.value("nvm_ramp", c.nvm_ramp);
  c.nvm_variation = j.value("nvm_variation", c.nvm_variation);
  c.nvm_enabled = j.value("nvm_enabled", c.nvm_enabled);
  c.default_level = j.value("default_level", c.default_level);
  return c;
}

inline nlohmann::ordered_json to_json(const PufInstance& d) {
  nlohmann::ordered_json j;
  j["seed"] = d.seed;
  j["config"] = to_json(d.config);
  j["stage_deltas"] = d.stage_deltas;
  j["nvm_delay"] = d.nvm_delay;
  j["set_count"] = d.set_count;
  j["reset_count"] = d.reset_count;
  j["last_used_pair"] = d.last_used_pair ? nlohmann::ordered_json(*d.last_used_pair) : nlohmann::ordered_json();
  j["set_pulses_issued"] = d.set_pulses_issued;
  j["reset_pulses_issued"] = d.reset_pulses_issued;
  return j;
}

inline PufInstance device_from_json(const nlohmann::json& j) {
  try {
    PufInstance d;
    d.seed = j.at("seed").get<std::uint64_t>();
    d.config = device_config_from_json(j.at("config"));
    d.stage_deltas = j.at("stage_deltas").get<decltype(d.stage_deltas)>();
    d.nvm_delay = j.at("nvm_delay").get<decltype(d.nvm_delay)>();
    d.set_count = j.at("set_count").get<decltype(d.set_count)>();
    d.reset_count = j.at("reset_count").get<decltype(d.reset_count)>();
    if (!j.at("last_used_pair").is_null()) d.last_used_pair = j.at("last_used_pair").get<int>();
    d.set_pulses_issued = j.at("set_pulses_issued").get<std::uint64_t>();
    d.reset_pulses_issued = j.at("reset_pulses_issued").get<std::uint64_t>();
    if (d.stage_deltas.size() != kStages || d.nvm_delay.size() != kCells || d.set_count.size() != kCells ||
        d.reset_count.size() != kCells)
      throw ParseError("device snapshot has wrong dimensions");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed device snapshot: ") + e.what());
  }
}

}  // namespace reapnvm
