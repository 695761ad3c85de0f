#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "edgerecon/baselines.hpp"

using namespace edgerecon;

TEST(RandomBaseline, SingletonSpace) {
  const ActionSpace space(5, 5, 5);
  Rng rng = make_rng(1, Stream::kCameraPolicy);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(baseline_random(space, rng).to_string(), "11111");
}

TEST(RandomBaseline, UniformOverTwentySixActionsAndAlwaysValid) {
  const ActionSpace space(5, 2, 5);
  Rng rng = make_rng(2, Stream::kCameraPolicy);
  std::vector<int> counts(space.size(), 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto m = baseline_random(space, rng);
    ASSERT_GE(m.count(), 2);
    ASSERT_LE(m.count(), 5);
    ++counts[space.index_of(m)];
  }
  const double e = static_cast<double>(n) / static_cast<double>(counts.size());
  double chi = 0;
  for (int c : counts) chi += (c - e) * (c - e) / e;
  // 99.9th percentile of chi-square with 25 degrees of freedom.
  EXPECT_LT(chi, 52.62);
}

TEST(Greedy3, SingleCandidate) {
  const ActionSpace space(3, 2, 3);
  Greedy3Policy g(space);
  ASSERT_EQ(g.n_candidates(), 1u);
  for (int i = 0; i < 5; ++i) {
    const auto m = g.select();
    EXPECT_EQ(m.to_string(), "111");
    g.observe(m, 100.0 * i);
  }
}

TEST(Greedy3, ColdStartVisitsEveryThreeCameraMaskInOrder) {
  const ActionSpace space(5, 2, 5);
  Greedy3Policy g(space);
  std::vector<std::string> visited;
  for (int i = 0; i < 10; ++i) {
    const auto m = g.select();
    visited.push_back(m.to_string());
    g.observe(m, 500.0);
  }
  std::vector<std::string> expect;
  for (const auto& m : space.actions())
    if (m.count() == 3) expect.push_back(m.to_string());
  EXPECT_EQ(visited, expect);
}

TEST(Greedy3, PicksTheBestMean) {
  const ActionSpace space(5, 2, 5);
  Greedy3Policy g(space);
  const auto best = CameraMask::from_string("01101");
  for (int i = 0; i < 10; ++i) {
    const auto m = g.select();
    g.observe(m, m == best ? 700.0 : 600.0 - i);
  }
  for (int i = 0; i < 5; ++i) EXPECT_EQ(g.select(), best);
  EXPECT_EQ(g.estimate(best), 700.0);
  EXPECT_TRUE(std::isnan(g.estimate(CameraMask::from_string("11000"))));
  EXPECT_THROW(g.observe(CameraMask::from_string("11000"), 1.0), ContractViolation);
}

TEST(Greedy3, TiesGoToCanonicalOrder) {
  const ActionSpace space(4, 2, 4);
  Greedy3Policy g(space);
  for (std::size_t i = 0; i < g.n_candidates(); ++i) g.observe(g.select(), 400.0);
  EXPECT_EQ(g.select(), space[space.with_count(3).front()]);
}

TEST(Greedy3, NeedsThreeCameraMasks) {
  EXPECT_THROW(Greedy3Policy(ActionSpace(5, 4, 5)), ConfigError);
}

TEST(Bandit, GreedyPicksTheBetterArm) {
  const ActionSpace space(2, 1, 1);
  BanditPolicy b(space, 0.0);
  b.learn(space[0], 0.9);
  b.learn(space[1], 0.1);
  Rng rng = make_rng(1, Stream::kCameraPolicy);
  EXPECT_EQ(b.select(rng), space[0]);
}

TEST(Bandit, RunningMean) {
  const ActionSpace space(2, 1, 1);
  BanditPolicy b(space, 0.1);
  b.learn(space[1], 1.0);
  b.learn(space[1], 0.0);
  EXPECT_EQ(b.mean(1), 0.5);
  EXPECT_EQ(b.pulls(1), 2);
  EXPECT_EQ(b.pulls(0), 0);
}

TEST(Bandit, RegretPerStepIsSmallOnStationaryArms) {
  const ActionSpace space(5, 2, 5);
  // Arm means spread over [0.2, 0.8]; each pull returns mean +/- 0.1.
  std::vector<double> mean(space.size());
  for (std::size_t i = 0; i < mean.size(); ++i)
    mean[i] = 0.2 + 0.6 * static_cast<double>((i * 7) % mean.size()) / static_cast<double>(mean.size() - 1);
  const double best = *std::max_element(mean.begin(), mean.end());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BanditPolicy b(space, 0.1);
    Rng rng = make_rng(seed, Stream::kCameraPolicy);
    std::mt19937_64 noise(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    double regret = 0;
    for (int t = 0; t < 2000; ++t) {
      const auto m = b.select(rng);
      const auto a = space.index_of(m);
      regret += best - mean[a];
      b.learn(m, mean[a] + u(noise));
    }
    EXPECT_LT(regret / 2000.0, 0.1) << "seed " << seed;
  }
}

TEST(RoundRobin, CyclesInOrder) {
  EXPECT_EQ(baseline_round_robin(0, 4), 0);
  std::vector<int> seq;
  for (int f = 0; f < 8; ++f) seq.push_back(baseline_round_robin(f, 4));
  EXPECT_EQ(seq, (std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3}));
  std::vector<int> counts(4, 0);
  for (int f = 0; f < 4000; ++f) ++counts[static_cast<std::size_t>(baseline_round_robin(f, 4))];
  EXPECT_EQ(counts, (std::vector<int>{1000, 1000, 1000, 1000}));
}

TEST(LatencyGreedy, EqualEstimatesPickServerZero) {
  LatencyGreedyPolicy lg(4, 0.3);
  EXPECT_EQ(lg.select(), 0);
  for (int s = 0; s < 4; ++s) lg.set_estimate(s, 2.0);
  EXPECT_EQ(lg.select(), 0);
}

TEST(LatencyGreedy, EwmaStep) {
  LatencyGreedyPolicy lg(2, 0.5);
  lg.set_estimate(0, 200.0);
  lg.observe(0, 400.0);
  EXPECT_EQ(lg.estimate(0), 300.0);
}

TEST(LatencyGreedy, FirstObservationSeedsTheEstimate) {
  LatencyGreedyPolicy lg(2, 0.3);
  lg.observe(1, 2.5);
  EXPECT_EQ(lg.estimate(1), 2.5);
  EXPECT_EQ(lg.select(), 0);
}

// A server at estimate L that starts returning L + S is abandoned once its
// EWMA passes the runner-up's estimate E. Closed form: the k-th spiked
// observation leaves L + S - S (1 - b)^k, so the switch happens after
// ceil(log(S / (L + S - E)) / log(1 / (1 - b))) observations.
TEST(LatencyGreedy, SpikeAvoidanceMatchesClosedFormCrossing) {
  struct Case {
    double beta, base, spike, other;
  };
  for (const auto c : {Case{0.3, 1.0, 1.0, 1.5}, Case{0.3, 2.0, 1.2, 2.9}, Case{0.5, 1.9, 0.8, 2.05},
                       Case{0.1, 1.5, 1.0, 2.2}, Case{0.7, 1.0, 2.0, 2.5}}) {
    LatencyGreedyPolicy lg(2, c.beta);
    lg.set_estimate(0, c.base);
    lg.set_estimate(1, c.other);
    int observations = 0;
    while (lg.select() == 0) {
      lg.observe(0, c.base + c.spike);
      ++observations;
      ASSERT_LT(observations, 1000);
    }
    const double ratio = c.spike / (c.base + c.spike - c.other);
    const int expect = static_cast<int>(std::ceil(std::log(ratio) / std::log(1.0 / (1.0 - c.beta))));
    EXPECT_EQ(observations, expect) << "beta " << c.beta;
  }
}

TEST(LatencyGreedy, RejectsBadBeta) {
  EXPECT_THROW(LatencyGreedyPolicy(2, 0.0), ConfigError);
  EXPECT_THROW(LatencyGreedyPolicy(2, 1.5), ConfigError);
}
