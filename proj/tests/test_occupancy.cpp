#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <reapnvm/chain_model.hpp>
#include <reapnvm/occupancy.hpp>

#include "oracles.hpp"

using namespace reapnvm;

namespace {

MarkovChainSpec self_loop(double stay, OpTag tag = OpTag::Set) {
  MarkovChainSpec c;
  c.states = {{0, "A", tag}, {1, "B", OpTag::None}};
  c.transition = {stay, 1.0 - stay, 0.0, 1.0};
  c.terminal = {1};
  return c;
}

/// start -> X -> Y -> X -> end, all deterministic; X is visited twice.
MarkovChainSpec twice_through_x() {
  MarkovChainSpec c;
  c.states = {{0, "start", OpTag::None}, {1, "X", OpTag::Set}, {2, "Y", OpTag::None},
              {3, "X again", OpTag::Set}, {4, "end", OpTag::None}};
  c.transition.assign(25, 0.0);
  c.prob(0, 1) = c.prob(1, 2) = c.prob(2, 3) = c.prob(3, 4) = c.prob(4, 4) = 1.0;
  c.terminal = {4};
  return c;
}

}  // namespace

TEST(Evolve, DeterministicStep) {
  const auto occ = evolve(self_loop(0.0));
  EXPECT_EQ(occ.converged_at, 1u);
  ASSERT_EQ(occ.probs.size(), 2u);
  EXPECT_EQ(occ.probs[0], (std::vector<double>{1, 0}));
  EXPECT_EQ(occ.probs[1], (std::vector<double>{0, 1}));
}

TEST(Evolve, HalfSelfLoopConvergesAtSeventeen) {
  const auto c = self_loop(0.5);
  const auto occ = evolve(c);
  // 1 - 0.5^t >= 1 - 1e-5  <=>  t >= log2(1e5).
  EXPECT_EQ(occ.converged_at, static_cast<std::size_t>(std::ceil(std::log2(1e5))));
  EXPECT_EQ(occ.converged_at, 17u);
}

TEST(Evolve, RowsAndTerminalMassInvariants) {
  for (const auto& c : {build_reap_nvm_chain(), build_ampuf_chain(), oracle::random_chain(3, 6)}) {
    const auto occ = evolve(c);
    EXPECT_GE(occ.terminal_mass(c, occ.converged_at), 1.0 - 1e-5);
    double prev = -1.0;
    for (std::size_t t = 0; t < occ.probs.size(); ++t) {
      double s = 0.0;
      for (double x : occ.probs[t]) s += x;
      EXPECT_NEAR(s, 1.0, 1e-9);
      const double m = occ.terminal_mass(c, t);
      EXPECT_GE(m, prev);
      prev = m;
    }
    EXPECT_EQ(occ.probs[0][c.initial], 1.0);
  }
}

TEST(Evolve, MaxItersIsAnError) {
  EXPECT_THROW(evolve(self_loop(0.999), 1e-5, 50), ConvergenceError);
  EXPECT_THROW(evolve(self_loop(0.5), 0.0), ValidationError);
}

TEST(VisitCounts, DeterministicDoubleVisit) {
  const auto c = twice_through_x();
  const auto occ = evolve(c);
  const std::vector<std::size_t> group{1, 3};
  for (auto m : {VisitRecursion::Joint, VisitRecursion::Factorized}) {
    const auto d = visit_count_distribution(c, occ, group, m);
    ASSERT_EQ(d.pmf.size(), 3u);
    EXPECT_NEAR(d.pmf[0], 0.0, 1e-15);
    EXPECT_NEAR(d.pmf[1], 0.0, 1e-15);
    EXPECT_NEAR(d.pmf[2], 1.0, 1e-15);
  }
  const auto mc = sample_trajectories(c, 1000, 5);
  EXPECT_EQ(mc.set_dist.pmf, (std::vector<double>{0, 0, 1}));
}

TEST(VisitCounts, GeometricClosedForm) {
  const auto c = self_loop(0.5);
  const auto occ = evolve(c);
  const std::vector<std::size_t> a{0};
  const auto d = visit_count_distribution(c, occ, a);
  EXPECT_NEAR(d.at(0), 0.0, 1e-15);
  // Visits to A: P(k) = 0.5^k for k >= 1. The last counted iteration lumps
  // the surviving 0.5^T of mass into k = T, so compare below the horizon.
  for (std::size_t k = 1; k < occ.converged_at; ++k) EXPECT_NEAR(d.at(k), std::pow(0.5, k), 1e-15) << k;
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-12);

  const auto mc = sample_trajectories(c, 1'000'000, 77);
  EXPECT_LT(total_variation(d, mc.set_dist), 0.005);
}

TEST(VisitCounts, ReapNvmZeroSetOpsIs127Over128) {
  const auto c = build_reap_nvm_chain();
  const auto ops = per_challenge_ops(c);
  EXPECT_NEAR(ops.set_dist.at(0), 127.0 / 128, 1e-12);
  EXPECT_NEAR(ops.reset_dist.at(0), 127.0 / 128, 1e-12);
  const auto mc = sample_trajectories(c, 1'000'000, 99);
  EXPECT_NEAR(mc.set_dist.at(0), 127.0 / 128, 5e-4);
}

TEST(VisitCounts, FactorizedFormMisestimatesSelfLoops) {
  // Same mean, wrong shape: the product form treats successive visits of a
  // self-loop as independent.
  const auto c = build_reap_nvm_chain();
  const auto occ = evolve(c);
  const auto set = c.states_tagged(OpTag::Set);
  const auto joint = visit_count_distribution(c, occ, set, VisitRecursion::Joint);
  const auto fact = visit_count_distribution(c, occ, set, VisitRecursion::Factorized);
  EXPECT_NEAR(joint.mean(), fact.mean(), 1e-9);
  EXPECT_GT(std::abs(fact.at(0) - 127.0 / 128), 0.01);
}

TEST(VisitCounts, MeanEqualsSumOfVisitProbabilities) {
  std::vector<MarkovChainSpec> chains{build_reap_nvm_chain(), build_ampuf_chain()};
  for (std::uint64_t s = 1; s <= 20; ++s) chains.push_back(oracle::random_chain(s, 2 + s % 5));
  for (const auto& c : chains) {
    const auto occ = evolve(c);
    for (auto tag : {OpTag::Set, OpTag::Reset}) {
      const auto g = c.states_tagged(tag);
      if (g.empty()) continue;
      double expected = 0.0;
      for (std::size_t t = 0; t <= occ.converged_at; ++t) expected += occ.group_mass(g, t);
      const auto d = visit_count_distribution(c, occ, g);
      EXPECT_NEAR(d.mean(), expected, 1e-6);
      EXPECT_NEAR(d.total_mass(), 1.0, 1e-9);
      for (double x : d.pmf) EXPECT_GE(x, 0.0);
    }
  }
}

TEST(VisitCounts, RejectsBadGroups) {
  const auto c = self_loop(0.5);
  const auto occ = evolve(c);
  const std::vector<std::size_t> empty, term{1}, unknown{9};
  EXPECT_THROW(visit_count_distribution(c, occ, empty), ValidationError);
  EXPECT_THROW(visit_count_distribution(c, occ, term), ValidationError);
  EXPECT_THROW(visit_count_distribution(c, occ, unknown), ValidationError);
}

TEST(PerChallengeOps, SetDominatesReset) {
  for (const auto& c : {build_reap_nvm_chain(), build_ampuf_chain()}) {
    const auto ops = per_challenge_ops(c);
    EXPECT_GT(ops.set_dist.mean(), ops.reset_dist.mean());
  }
}

TEST(PerChallengeOps, AmpufAlwaysSets) {
  const auto c = build_ampuf_chain();
  EXPECT_NEAR(per_challenge_ops(c).set_dist.at(0), 0.0, 1e-15);
  EXPECT_EQ(sample_trajectories(c, 100'000, 3).set_dist.at(0), 0.0);
}

TEST(PerChallengeOps, NoResetStatesGivesPointMass) {
  const auto ops = per_challenge_ops(self_loop(0.25));
  EXPECT_EQ(ops.reset_dist.pmf, (std::vector<double>{1.0}));
  EXPECT_EQ(ops.reset_dist.total_mass(), 1.0);
}

TEST(PerChallengeOps, UntaggedChainIsAnError) {
  EXPECT_THROW(per_challenge_ops(self_loop(0.25, OpTag::None)), ValidationError);
}

TEST(PerChallengeOps, CombinedIsTheExactSum) {
  // In REAP-NVM a cell is either set or reset in one challenge, never both,
  // so the sum is a mixture; the joint pmf must reflect that.
  const auto c = build_reap_nvm_chain();
  const auto ops = per_challenge_ops(c);
  EXPECT_NEAR(ops.combined_dist.at(0), 126.0 / 128, 1e-12);
  EXPECT_NEAR(ops.combined_dist.mean(), ops.set_dist.mean() + ops.reset_dist.mean(), 1e-9);
  const auto mc = sample_trajectories(c, 1'000'000, 5);
  EXPECT_LT(total_variation(ops.combined_dist, mc.combined_dist), 0.01);
}

TEST(SampleTrajectories, DeterministicAndThreadIndependent) {
  const auto c = build_ampuf_chain();
  const auto a = sample_trajectories(c, 20'000, 42, 1);
  const auto b = sample_trajectories(c, 20'000, 42, 4);
  const auto again = sample_trajectories(c, 20'000, 42, 1);
  EXPECT_EQ(a.set_dist.pmf, b.set_dist.pmf);
  EXPECT_EQ(a.reset_dist.pmf, b.reset_dist.pmf);
  EXPECT_EQ(a.set_dist.pmf, again.set_dist.pmf);
  EXPECT_NE(a.set_dist.pmf, sample_trajectories(c, 20'000, 43, 1).set_dist.pmf);
  EXPECT_THROW(sample_trajectories(c, 0, 1), ValidationError);
}

TEST(SampleTrajectories, RandomChainsAgreeWithRecursion) {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto c = oracle::random_chain(100 + s, 3 + s % 4);
    const auto ops = per_challenge_ops(c);
    const auto mc = sample_trajectories(c, 200'000, s);
    EXPECT_LT(total_variation(ops.set_dist, mc.set_dist), 0.01) << s;
    EXPECT_LT(total_variation(ops.reset_dist, mc.reset_dist), 0.01) << s;
  }
}

TEST(Distribution, JsonAndCsvRoundTrip) {
  CountDistribution d;
  d.pmf = {0.25, 0.5, 0.2};
  d.truncated_mass = 0.05;
  const auto back = distribution_from_json(nlohmann::json::parse(to_json(d).dump()));
  EXPECT_EQ(back.pmf, d.pmf);
  EXPECT_EQ(back.truncated_mass, d.truncated_mass);
  EXPECT_EQ(to_csv(d).substr(0, 18), "count,probability\n");
  EXPECT_NEAR(total_variation(d, d), 0.0, 0.0);
}
