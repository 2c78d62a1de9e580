#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "chain_model.hpp"
#include "errors.hpp"

namespace reapnvm {

enum class BuiltinPuf { ReapNvm, AMpuf };

inline BuiltinPuf builtin_puf_from_string(std::string_view s) {
  if (s == "reap-nvm") return BuiltinPuf::ReapNvm;
  if (s == "a-mpuf") return BuiltinPuf::AMpuf;
  throw ValidationError("unknown built-in PUF '" + std::string(s) + "' (reap-nvm|a-mpuf)");
}

inline std::string_view to_string(BuiltinPuf p) { return p == BuiltinPuf::ReapNvm ? "reap-nvm" : "a-mpuf"; }

inline MarkovChainSpec build_chain(BuiltinPuf p, const ChainParams& params) {
  return p == BuiltinPuf::ReapNvm ? build_reap_nvm_chain(params) : build_ampuf_chain(params);
}

// Calibrated parameter sets. Each knob was found with calibrate_half_life so
// that the set-mode half-life (1000-cycle limit, 256 cells, 15%) equals the
// reference value: 21099 challenges for REAP-NVM, 341 for A-MPUF.

inline constexpr std::uint64_t kReapNvmTargetHalfLife = 21099;
inline constexpr std::uint64_t kAMpufTargetHalfLife = 341;

/// Level-expanded REAP-NVM: 8 levels, imperfect program-and-verify pulses.
inline ChainParams calibrated_reap_nvm_params() {
  ChainParams p;
  p.set_model = SetModel::LevelExpanded;
  p.n_levels = 8;
  p.pulse_success = 0.654590;
  return p;
}

/// Level-expanded A-MPUF. Eight levels would already cost 3.625 pulses per
/// write on average, more than the reference half-life allows, so the chain
/// uses four levels.
inline ChainParams calibrated_ampuf_params() {
  ChainParams p;
  p.set_model = SetModel::LevelExpanded;
  p.n_levels = 4;
  p.pulse_success = 0.617188;
  return p;
}

/// Geometric set loop, mean_set_pulses calibrated.
inline ChainParams calibrated_geometric_params(BuiltinPuf puf) {
  ChainParams p;
  p.mean_set_pulses = puf == BuiltinPuf::ReapNvm ? 5.482635 : 2.8125;
  return p;
}

inline ChainParams calibrated_params(BuiltinPuf puf) {
  return puf == BuiltinPuf::ReapNvm ? calibrated_reap_nvm_params() : calibrated_ampuf_params();
}

inline std::uint64_t target_half_life(BuiltinPuf puf) {
  return puf == BuiltinPuf::ReapNvm ? kReapNvmTargetHalfLife : kAMpufTargetHalfLife;
}

}  // namespace reapnvm
