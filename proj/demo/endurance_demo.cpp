// Builds both built-in chains, prints their per-challenge wear and the
// challenge count at which half of all devices are expected to be dead.

#include <cstdio>
#include <string>

#include <reapnvm/lifetime.hpp>
#include <reapnvm/occupancy.hpp>
#include <reapnvm/presets.hpp>

int main() {
  using namespace reapnvm;
  for (auto puf : {BuiltinPuf::ReapNvm, BuiltinPuf::AMpuf}) {
    const auto chain = build_chain(puf, calibrated_params(puf));
    const auto ops = per_challenge_ops(chain);
    LifetimeParams params;
    params.mode = LifetimeMode::SetOnly;
    const auto hl = half_life_exact(chain, params);
    std::printf("%-9s set/challenge %.5f  reset/challenge %.5f  half-life %llu (target %llu)\n",
                std::string(to_string(puf)).c_str(), ops.set_dist.mean(), ops.reset_dist.mean(),
                static_cast<unsigned long long>(hl), static_cast<unsigned long long>(target_half_life(puf)));
  }
}
