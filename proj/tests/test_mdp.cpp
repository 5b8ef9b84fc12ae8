#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "entropic/errors.hpp"
#include "entropic/mdp.hpp"
#include "entropic/mdp_json.hpp"
#include "entropic/random_instances.hpp"
#include "entropic/twisting.hpp"

using namespace entropic;

namespace {

// Two non-terminal states and one terminal sink; action 1 from state 0 slips.
TabularMDP small_mdp() {
  std::vector<Mat> p(2, Mat::Zero(3, 3));
  p[0] << 0.0, 1.0, 0.0,  //
      0.0, 0.0, 1.0,      //
      0.0, 0.0, 1.0;
  p[1] << 0.2, 0.8, 0.0,  //
      0.5, 0.0, 0.5,      //
      0.0, 0.0, 1.0;
  Mat r(3, 2);
  r << 1.0, 2.0, -1.0, 0.5, 0.0, 0.0;
  Vec init(3);
  init << 1.0, 0.0, 0.0;
  return TabularMDP(p, r, init, {false, false, true}, 3, 0.9);
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, SplitDiffersFromParent) {
  Rng a(7);
  Rng child = a.split();
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a() == child();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(TabularMDP, RejectsRowNotSummingToOne) {
  std::vector<Mat> p(1, Mat::Identity(2, 2));
  p[0](1, 0) = 0.1;
  try {
    TabularMDP(p, Mat::Zero(2, 1), Vec::Constant(2, 0.5), {false, false});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("transition[1][0]"), std::string::npos) << e.what();
  }
}

TEST(TabularMDP, RejectsTerminalWithReward) {
  std::vector<Mat> p(1, Mat::Identity(2, 2));
  Mat r = Mat::Zero(2, 1);
  r(1, 0) = 1.0;
  EXPECT_THROW(TabularMDP(p, r, Vec::Constant(2, 0.5), {false, true}), ValidationError);
}

TEST(TabularMDP, RejectsTerminalWithoutSelfLoop) {
  std::vector<Mat> p(1, Mat::Zero(2, 2));
  p[0] << 0.0, 1.0, 1.0, 0.0;
  EXPECT_THROW(TabularMDP(p, Mat::Zero(2, 1), Vec::Constant(2, 0.5), {false, true}), ValidationError);
}

TEST(TabularMDP, RandomInstancesAreNormalized) {
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto mdp = random_tabular_mdp(rng, 2 + k % 4, 1 + k % 3);
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) EXPECT_NEAR(mdp.transition_row(s, a).sum(), 1.0, 1e-12);
    EXPECT_NEAR(mdp.initial().sum(), 1.0, 1e-12);
  }
}

TEST(SampleTransition, DeterministicRow) {
  const auto mdp = small_mdp();
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto tr = sample_transition(mdp, 0, 0, rng);
    EXPECT_EQ(tr.next_state, 1u);
    EXPECT_EQ(tr.reward, 1.0);
    EXPECT_FALSE(tr.done);
  }
}

TEST(SampleTransition, SlipRowFrequenciesWithinThreeSigma) {
  const auto mdp = small_mdp();
  Rng rng(2);
  const int n = 100000;
  int stay = 0;
  for (int i = 0; i < n; ++i) stay += sample_transition(mdp, 0, 1, rng).next_state == 0;
  const double sigma = std::sqrt(n * 0.2 * 0.8);
  EXPECT_LT(std::abs(stay - 0.2 * n), 3.0 * sigma);
}

TEST(SampleTransition, TerminalSelfLoop) {
  const auto mdp = small_mdp();
  Rng rng(3);
  const auto before = rng.counter();
  const auto tr = sample_transition(mdp, 2, 1, rng);
  EXPECT_EQ(tr.next_state, 2u);
  EXPECT_EQ(tr.reward, 0.0);
  EXPECT_TRUE(tr.done);
  EXPECT_EQ(rng.counter(), before);
}

TEST(SampleTransition, OutOfRangeThrows) {
  const auto mdp = small_mdp();
  Rng rng(3);
  EXPECT_THROW(sample_transition(mdp, 3, 0, rng), std::out_of_range);
  EXPECT_THROW(sample_transition(mdp, 0, 2, rng), std::out_of_range);
}

TEST(Rollout, AbsorbingSingleStateHasLengthOne) {
  const TabularMDP mdp({Mat::Ones(1, 1)}, Mat::Zero(1, 1), Vec::Ones(1), {true}, 5);
  Rng rng(4);
  const auto traj = rollout(mdp, StochasticTabularPolicy::uniform(1, 1), rng, 10);
  EXPECT_EQ(traj.size(), 1u);
  EXPECT_TRUE(traj.steps.back().done);
}

TEST(Rollout, ZeroStepsIsAnError) {
  const auto mdp = small_mdp();
  Rng rng(4);
  EXPECT_THROW(rollout(mdp, StochasticTabularPolicy::uniform(3, 2), rng, 0), ValidationError);
}

TEST(Rollout, ChainsStatesAndIsReproducible) {
  const auto mdp = small_mdp();
  const auto policy = StochasticTabularPolicy::uniform(3, 2);
  Rng a(9), b(9);
  for (int k = 0; k < 100; ++k) {
    const auto ta = rollout(mdp, policy, a, 3);
    const auto tb = rollout(mdp, policy, b, 3);
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
      EXPECT_EQ(ta.steps[i].state, tb.steps[i].state);
      EXPECT_EQ(ta.steps[i].action, tb.steps[i].action);
      if (i + 1 < ta.size()) EXPECT_EQ(ta.steps[i].next_state, ta.steps[i + 1].state);
    }
    EXPECT_LE(ta.size(), 3u);
  }
}

// Per-stage chi-square goodness of fit against the exact state distribution.
TEST(Rollout, StageFrequenciesMatchExactDistribution) {
  Rng gen(21);
  const auto mdp = random_tabular_mdp(gen, 4, 2, 3);
  const auto policy = StochasticTabularPolicy::softmax(random_logits(gen, 4, 2));
  const auto d = state_distributions(mdp, policy, BackupMode::FiniteHorizon);
  const int n = 100000;
  std::vector<Vec> counts(3, Vec::Zero(4));
  Rng rng(22);
  for (int i = 0; i < n; ++i) {
    const auto traj = rollout(mdp, policy, rng, 3);
    for (std::size_t t = 0; t < traj.size(); ++t) counts[t](static_cast<Eigen::Index>(traj.steps[t].state)) += 1.0;
  }
  const double critical = 16.266;  // chi-square, 3 dof, p = 0.001
  for (std::size_t t = 0; t < 3; ++t) {
    double chi2 = 0.0;
    for (Eigen::Index s = 0; s < 4; ++s) {
      const double expected = n * d[t](s);
      chi2 += (counts[t](s) - expected) * (counts[t](s) - expected) / expected;
    }
    EXPECT_LT(chi2, critical) << "stage " << t;
  }
}

TEST(TrajectoryReturn, Examples) {
  Trajectory traj;
  for (int i = 0; i < 3; ++i) traj.steps.push_back({0, 0, 1.0, 0, false});
  EXPECT_DOUBLE_EQ(trajectory_return(traj, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(trajectory_return(traj, 0.5), 1.75);
  EXPECT_DOUBLE_EQ(trajectory_return(Trajectory{}, 0.9), 0.0);
  EXPECT_THROW(trajectory_return(traj, 0.0), ValidationError);
}

TEST(Policy, SoftmaxRowsNormalized) {
  Mat logits(2, 3);
  logits << 1000.0, 0.0, -1000.0, 0.1, 0.2, 0.3;
  const auto p = StochasticTabularPolicy::softmax(logits);
  EXPECT_NEAR(p.probs().row(0).sum(), 1.0, 1e-12);
  EXPECT_NEAR(p.prob(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(p.probs().row(1).sum(), 1.0, 1e-12);
}

TEST(Policy, RejectsNegativeEntry) {
  Mat probs(1, 2);
  probs << 1.5, -0.5;
  EXPECT_THROW(StochasticTabularPolicy{probs}, ValidationError);
}

TEST(MdpJson, RoundTrip) {
  const auto mdp = small_mdp();
  const auto back = mdp_from_json(mdp_to_json(mdp));
  ASSERT_EQ(back.n_states(), mdp.n_states());
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      EXPECT_EQ(back.reward(s, a), mdp.reward(s, a));
      for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(back.transition(s, a, n), mdp.transition(s, a, n));
    }
  EXPECT_EQ(back.horizon(), mdp.horizon());
  EXPECT_EQ(back.discount(), mdp.discount());
  EXPECT_EQ(back.terminal_flags(), mdp.terminal_flags());
}

TEST(MdpJson, RejectsUnknownKey) {
  auto doc = mdp_to_json(small_mdp());
  doc["extra"] = 1;
  EXPECT_THROW(mdp_from_json(doc), ValidationError);
}

TEST(MdpJson, NamesOffendingRow) {
  auto doc = mdp_to_json(small_mdp());
  doc["transition"][1][1][0] = 0.7;
  try {
    mdp_from_json(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("transition[1][1]"), std::string::npos) << e.what();
  }
}

TEST(MdpJson, WrongTypeIsValidationError) {
  auto doc = mdp_to_json(small_mdp());
  doc["n_states"] = "three";
  EXPECT_THROW(mdp_from_json(doc), ValidationError);
}
