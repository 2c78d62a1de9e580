#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <reapnvm/lifetime.hpp>
#include <reapnvm/presets.hpp>

#include "oracles.hpp"

using namespace reapnvm;

namespace {

CountDistribution bernoulli(double p) {
  CountDistribution d;
  d.pmf = {1.0 - p, p};
  return d;
}

LifetimeParams params_for(int m, double fraction) {
  LifetimeParams p;
  p.cell_count = m;
  p.dead_fraction = fraction;
  return p;
}

/// Binomial tail P(K > floor(f M)) with 50 significant digits.
double high_precision_tail(int m, double p_cell, double fraction) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const int thr = static_cast<int>(std::floor(fraction * m + 1e-9));
  const big p(p_cell), q = big(1) - p;
  big sum = 0, coeff = 1;  // coeff = C(m, k)
  for (int k = 0; k <= m; ++k) {
    if (k > 0) coeff = coeff * (m - k + 1) / k;
    if (k > thr) sum += coeff * pow(p, k) * pow(q, m - k);
  }
  return sum.convert_to<double>();
}

}  // namespace

TEST(TotalOps, PointMassScales) {
  const auto d = total_ops_after_n(CountDistribution::point_mass(1), 5, 100);
  EXPECT_EQ(d.at(5), 1.0);
  EXPECT_EQ(d.overflow_mass, 0.0);
}

TEST(TotalOps, BernoulliSumIsBinomial) {
  for (int n : {1, 10, 100, 1000}) {
    const auto d = total_ops_after_n(bernoulli(0.5), static_cast<std::uint64_t>(n), 5000);
    const auto ref = oracle::binomial_pmf(n, 0.5);
    double err = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) err = std::max(err, std::abs(d.at(k) - ref[k]));
    EXPECT_LT(err, 1e-12) << n;
  }
}

TEST(TotalOps, DoublingMatchesNaiveConvolution) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    CountDistribution d;
    d.pmf.resize(1 + rng() % 16);
    double s = 0.0;
    for (auto& x : d.pmf) s += x = u(rng);
    for (auto& x : d.pmf) x /= s;
    for (int n = 1; n <= 8; ++n) {
      const auto ref = oracle::naive_nfold(d.pmf, n);
      const auto got = total_ops_after_n(d, static_cast<std::uint64_t>(n), 1000);
      for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(got.at(k), ref[k], 1e-12);
    }
  }
}

TEST(TotalOps, CapFoldsTheTailIntoOverflow) {
  const auto d = total_ops_after_n(bernoulli(0.5), 20, 10);
  const auto ref = oracle::binomial_pmf(20, 0.5);
  double tail = 0.0;
  for (int k = 11; k <= 20; ++k) tail += ref[static_cast<std::size_t>(k)];
  EXPECT_NEAR(d.overflow_mass, tail, 1e-14);
  EXPECT_EQ(d.pmf.size(), 11u);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(d.at(static_cast<std::size_t>(k)), ref[static_cast<std::size_t>(k)], 1e-14);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-12);
}

TEST(TotalOps, NormalizationSurvivesLongRuns) {
  const auto ops = per_challenge_ops(build_reap_nvm_chain());
  NFoldSum sum(ops.set_dist, 1000);
  for (std::uint64_t n : {1ULL, 7ULL, 1000ULL, 33819ULL, 1'000'000ULL}) {
    const auto d = sum(n);
    EXPECT_NEAR(d.total_mass(), 1.0, 1e-9) << n;
    for (double x : d.pmf) EXPECT_GE(x, 0.0);
  }
}

TEST(CellDead, StrictComparison) {
  EXPECT_EQ(cell_dead_prob(CountDistribution::point_mass(1000), 1000), 0.0);
  EXPECT_EQ(cell_dead_prob(CountDistribution::point_mass(1001), 1000), 1.0);
}

TEST(CellDead, BinomialTail) {
  const auto d = total_ops_after_n(bernoulli(0.5), 2000, 1000);
  const auto pmf = oracle::binomial_pmf(2000, 0.5);
  double ref = 0.0;
  for (std::size_t k = 1001; k < pmf.size(); ++k) ref += pmf[k];
  EXPECT_NEAR(cell_dead_prob(d, 1000), ref, 1e-12);
  // By symmetry P(X > 1000) = (1 - P(X = 1000)) / 2.
  EXPECT_NEAR(ref, (1.0 - pmf[1000]) / 2.0, 1e-12);
  EXPECT_NEAR(ref, 0.4911, 5e-5);
}

TEST(CellDead, MonotoneInNAndLimit) {
  const auto ops = per_challenge_ops(build_ampuf_chain());
  NFoldSum sum(ops.set_dist, 1000);
  double prev = 0.0;
  for (std::uint64_t n = 100; n <= 600; n += 25) {
    const double p = cell_dead_prob(sum(n), 1000);
    EXPECT_GE(p, prev - 1e-12);
    prev = p;
  }
  const auto d = sum(300);
  double last = 1.0;
  for (int lim = 800; lim <= 1000; lim += 20) {
    const double p = cell_dead_prob(d, lim);
    EXPECT_LE(p, last + 1e-12);
    last = p;
  }
}

TEST(CellDead, CapBelowLimitIsRejected) {
  const auto d = total_ops_after_n(bernoulli(0.5), 20, 5);
  EXPECT_THROW(cell_dead_prob(d, 10), ValidationError);
}

TEST(PufDead, Endpoints) {
  const LifetimeParams p;
  EXPECT_EQ(puf_dead_prob(0.0, p), 0.0);
  EXPECT_EQ(puf_dead_prob(1.0, p), 1.0);
  EXPECT_THROW(puf_dead_prob(1.5, p), ValidationError);
}

TEST(PufDead, MatchesBruteForceForSmallM) {
  for (int m = 1; m <= 30; ++m)
    for (double f : {0.1, 0.15, 0.5})
      for (double pc : {0.01, 0.1, 0.15, 0.3, 0.5, 0.9}) {
        const auto params = params_for(m, f);
        const int thr = static_cast<int>(std::floor(f * m + 1e-9));
        EXPECT_NEAR(puf_dead_prob(pc, params), oracle::binomial_tail(m, pc, thr), 1e-12) << m << ' ' << f << ' ' << pc;
      }
}

TEST(PufDead, MatchesHighPrecisionAt256Cells) {
  const LifetimeParams p;
  EXPECT_EQ(dead_cell_threshold(p), 38);
  for (double pc : {0.05, 0.15, 0.3}) EXPECT_NEAR(puf_dead_prob(pc, p), high_precision_tail(256, pc, 0.15), 1e-9) << pc;
  // scipy.stats.binom.sf(38, 256, 0.15)
  EXPECT_NEAR(puf_dead_prob(0.15, p), 0.4848531527796565, 1e-12);
}

TEST(LifetimeCurve, MonotoneForEveryBuiltinAndMode) {
  for (auto puf : {BuiltinPuf::ReapNvm, BuiltinPuf::AMpuf})
    for (const auto& cp : {ChainParams{}, calibrated_params(puf)})
      for (auto mode : {LifetimeMode::SetOnly, LifetimeMode::ResetOnly, LifetimeMode::Combined,
                        LifetimeMode::EitherExceeds}) {
        LifetimeParams lp;
        lp.mode = mode;
        const auto curve = lifetime_curve(build_chain(puf, cp), lp);
        ASSERT_EQ(curve.p_dead.size(), curve.challenge_grid.size());
        for (std::size_t i = 1; i < curve.p_dead.size(); ++i) {
          EXPECT_GE(curve.p_dead[i], curve.p_dead[i - 1] - 1e-12);
          EXPECT_GT(curve.challenge_grid[i], curve.challenge_grid[i - 1]);
        }
        EXPECT_GE(curve.p_dead.front(), 0.0);
        EXPECT_NEAR(curve.p_dead.back(), 1.0, 1e-9);
      }
}

TEST(LifetimeCurve, ReapNvmIsLaterAtEveryLevel) {
  LifetimeParams lp;
  const auto reap = lifetime_curve(build_reap_nvm_chain(), lp);
  const auto ampuf = lifetime_curve(build_ampuf_chain(), lp);
  const auto grid = default_grid();
  LifetimeModel mr(build_reap_nvm_chain(), lp), ma(build_ampuf_chain(), lp);
  for (auto n : grid) EXPECT_LE(mr.p_dead(n), ma.p_dead(n) + 1e-12) << n;
  EXPECT_GT(half_life(reap), half_life(ampuf));
}

TEST(LifetimeCurve, GridValidation) {
  LifetimeModel m(build_ampuf_chain(), LifetimeParams{});
  EXPECT_THROW(lifetime_curve(m, {0, 1}), ValidationError);
  EXPECT_THROW(lifetime_curve(m, {5, 5}), ValidationError);
  const auto g = default_grid();
  EXPECT_EQ(g.front(), 1u);
  EXPECT_EQ(g.back(), 10'000'000u);
}

TEST(HalfLife, InterpolatesOnTheGrid) {
  LifetimeCurve c{{1, 2, 3}, {0.0, 0.5, 1.0}, {}};
  EXPECT_DOUBLE_EQ(half_life(c), 2.0);
  c.p_dead = {0.0, 0.1, 0.2};
  EXPECT_THROW(half_life(c), ConvergenceError);
}

TEST(HalfLife, RefinedCurveAgreesWithExactSearch) {
  for (auto puf : {BuiltinPuf::ReapNvm, BuiltinPuf::AMpuf}) {
    const auto chain = build_chain(puf, calibrated_params(puf));
    const LifetimeParams lp;
    const auto curve = lifetime_curve(chain, lp);
    const auto exact = half_life_exact(chain, lp);
    EXPECT_NEAR(half_life(curve), static_cast<double>(exact), 1.0);
  }
}

TEST(HalfLife, CalibratedPresetsHitTheTargets) {
  const LifetimeParams lp;
  const auto reap = half_life_exact(build_chain(BuiltinPuf::ReapNvm, calibrated_reap_nvm_params()), lp);
  const auto ampuf = half_life_exact(build_chain(BuiltinPuf::AMpuf, calibrated_ampuf_params()), lp);
  EXPECT_NEAR(static_cast<double>(reap), 21099.0, 0.25 * 21099);
  EXPECT_NEAR(static_cast<double>(ampuf), 341.0, 0.25 * 341);
  const double ratio = static_cast<double>(reap) / static_cast<double>(ampuf);
  EXPECT_GE(ratio, 45.0);
  EXPECT_LE(ratio, 80.0);
}

TEST(HalfLife, DefaultsKeepAnOrderOfMagnitudeAdvantage) {
  const LifetimeParams lp;
  const auto reap = half_life_exact(build_reap_nvm_chain(), lp);
  const auto ampuf = half_life_exact(build_ampuf_chain(), lp);
  EXPECT_GE(static_cast<double>(reap) / static_cast<double>(ampuf), 10.0);
}

TEST(HalfLife, SetWearsOutBeforeReset) {
  for (auto puf : {BuiltinPuf::ReapNvm, BuiltinPuf::AMpuf}) {
    LifetimeParams set, reset;
    reset.mode = LifetimeMode::ResetOnly;
    const auto chain = build_chain(puf, ChainParams{});
    EXPECT_LT(half_life_exact(chain, set), half_life_exact(chain, reset));
  }
}

TEST(HalfLife, ModesOrderAsExpected) {
  // Combined counts more operations and EitherExceeds is a union of events,
  // so neither can outlive set-only wear.
  const auto chain = build_ampuf_chain();
  LifetimeParams p;
  const auto set = half_life_exact(chain, p);
  p.mode = LifetimeMode::Combined;
  const auto combined = half_life_exact(chain, p);
  p.mode = LifetimeMode::EitherExceeds;
  const auto either = half_life_exact(chain, p);
  EXPECT_LE(combined, set);
  EXPECT_LE(either, set);
}

TEST(Calibration, RecoversAKnownKnob) {
  const LifetimeParams lp;
  auto make = [](double mean) {
    ChainParams p;
    p.mean_set_pulses = mean;
    return build_ampuf_chain(p);
  };
  const auto target = half_life_exact(make(3.0), lp);
  const auto cal = calibrate_half_life(make, lp, target, 1.5, 6.0);
  EXPECT_EQ(cal.half_life, target);
  EXPECT_THROW(calibrate_half_life(make, lp, 10, 1.5, 6.0), ConvergenceError);
}

TEST(LifetimeParams, Validation) {
  LifetimeParams p;
  p.dead_fraction = 1.0;
  EXPECT_THROW(LifetimeModel(build_ampuf_chain(), p), ValidationError);
  p = {};
  p.endurance_limit = 0;
  EXPECT_THROW(LifetimeModel(build_ampuf_chain(), p), ValidationError);
  for (auto m : {LifetimeMode::SetOnly, LifetimeMode::ResetOnly, LifetimeMode::Combined, LifetimeMode::EitherExceeds})
    EXPECT_EQ(lifetime_mode_from_string(to_string(m)), m);
  EXPECT_THROW(lifetime_mode_from_string("max"), ValidationError);
}

TEST(LifetimeExport, CsvAndJson) {
  LifetimeCurve c{{1, 10}, {0.0, 1.0}, {}};
  EXPECT_EQ(to_csv(c), "challenges,p_dead\n1,0\n10,1\n");
  const auto j = to_json(c);
  EXPECT_EQ(j["params"]["mode"], "set");
  EXPECT_EQ(j["challenges"].size(), 2u);
}
