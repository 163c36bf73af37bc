// Copyright 2026 The socnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socnav/intent.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "socnav/features.hpp"
#include "test_util.hpp"

namespace socnav {
namespace {

using testing::fd_gradient;
using testing::relative_error;
using testing::stationary_robot;
using testing::straight_robot;
using testing::wide_human_bounds;

HumanTrajectory straight_human(const HumanState& s0, int n, double dt = 0.5) {
  return rollout_human(s0, std::vector<HumanAction>(static_cast<size_t>(n)),
                       dt, wide_human_bounds());
}

// Closed-form posterior when both hypotheses explain the motion equally well
// and only the decayed message separates them (uniform prior).
double decayed_posterior(double delta, const DecayParams& p = {}) {
  const double boost = p.amplitude * std::exp(-delta / p.time_constant) + 1.0;
  return boost / (boost + 1.0);
}

TEST(ExplicitDecay, MatchesClosedFormAtKeyOffsets) {
  const DecayParams p;  // amplitude 8, time constant 3
  const CommEvent comm{Intent::kHumanPriority, 2.0};
  const auto value = [&](double delta) {
    return explicit_likelihood(comm, Intent::kHumanPriority, comm.t_c + delta,
                               p);
  };
  EXPECT_NEAR(value(0.0), p.amplitude + 1.0, 1e-12);
  EXPECT_NEAR(value(p.time_constant), p.amplitude / M_E + 1.0, 1e-12);
  EXPECT_NEAR(value(5.0 * p.time_constant),
              p.amplitude * std::exp(-5.0) + 1.0, 1e-12);
  // Long after the announcement the boost is gone.
  EXPECT_NEAR(value(20.0 * p.time_constant), 1.0, 1e-3);
}

TEST(ExplicitDecay, UnrelatedOrAbsentMessageIsFlat) {
  const CommEvent comm{Intent::kRobotPriority, 1.0};
  EXPECT_EQ(explicit_likelihood(comm, Intent::kHumanPriority, 1.5), 1.0);
  EXPECT_EQ(explicit_likelihood(std::nullopt, Intent::kHumanPriority, 1.5),
            1.0);
  EXPECT_EQ(explicit_likelihood(std::nullopt, Intent::kRobotPriority, 0.0),
            1.0);
}

TEST(ExplicitDecay, RejectsQueriesBeforeTheMessage) {
  const CommEvent comm{Intent::kHumanPriority, 2.0};
  EXPECT_THROW(explicit_likelihood(comm, Intent::kHumanPriority, 1.9),
               std::invalid_argument);
}

TEST(ExplicitDecay, RejectsNonPositiveParameters) {
  const CommEvent comm{Intent::kHumanPriority, 0.0};
  EXPECT_THROW(
      explicit_likelihood(comm, Intent::kHumanPriority, 1.0, {0.0, 3.0}),
      std::invalid_argument);
  EXPECT_THROW(
      explicit_likelihood(comm, Intent::kHumanPriority, 1.0, {8.0, -1.0}),
      std::invalid_argument);
}

TEST(CombineEvidence, WorkedPosteriorMatchesClosedForm) {
  // Fresh human-priority message, motion uninformative: (A+1)/(A+2) = 0.9.
  const DecayParams p;
  const IntentBelief b =
      combine_evidence(-3.7, -3.7, p.amplitude + 1.0, 1.0, {0.5});
  EXPECT_NEAR(b.p_human_priority, 0.9, 1e-12);
  EXPECT_NEAR(b.p(Intent::kHumanPriority) + b.p(Intent::kRobotPriority), 1.0,
              1e-15);

  // The same closed form holds at every decay offset.
  const CommEvent comm{Intent::kHumanPriority, 0.0};
  for (double delta : {0.0, 0.7, 1.5, 3.0, 9.0, 30.0}) {
    const double eh =
        explicit_likelihood(comm, Intent::kHumanPriority, delta, p);
    const double er =
        explicit_likelihood(comm, Intent::kRobotPriority, delta, p);
    const IntentBelief bd = combine_evidence(-1.25, -1.25, eh, er, {0.5});
    EXPECT_NEAR(bd.p_human_priority, decayed_posterior(delta, p), 1e-12);
  }
}

TEST(CombineEvidence, DecayedPosteriorIsMonotoneAndBounded) {
  const DecayParams p;
  double prev = 1.0;
  for (double delta = 0.0; delta <= 12.0; delta += 0.25) {
    const double post = decayed_posterior(delta, p);
    const CommEvent comm{Intent::kHumanPriority, 0.0};
    const IntentBelief b = combine_evidence(
        0.0, 0.0, explicit_likelihood(comm, Intent::kHumanPriority, delta, p),
        explicit_likelihood(comm, Intent::kRobotPriority, delta, p), {0.5});
    EXPECT_NEAR(b.p_human_priority, post, 1e-12);
    EXPECT_LT(b.p_human_priority, prev);       // strictly decaying
    EXPECT_GT(b.p_human_priority, 0.5);        // never flips the message
    EXPECT_LE(b.p_human_priority, (p.amplitude + 1.0) / (p.amplitude + 2.0));
    prev = b.p_human_priority;
  }
  EXPECT_NEAR(decayed_posterior(20.0 * p.time_constant, p), 0.5, 1e-3);
}

TEST(CombineEvidence, RespondsToImplicitEvidenceAndPrior) {
  const IntentBelief weak = combine_evidence(-2.0, -1.0, 1.0, 1.0, {0.5});
  const IntentBelief strong = combine_evidence(-1.0, -2.0, 1.0, 1.0, {0.5});
  EXPECT_LT(weak.p_human_priority, 0.5);
  EXPECT_GT(strong.p_human_priority, 0.5);
  EXPECT_NEAR(weak.p_human_priority + strong.p_human_priority, 1.0, 1e-12);

  // Bayes: equal likelihoods return the prior unchanged.
  const IntentBelief prior{0.3};
  const IntentBelief kept = combine_evidence(-4.2, -4.2, 1.0, 1.0, prior);
  EXPECT_NEAR(kept.p_human_priority, 0.3, 1e-12);
}

TEST(CombineEvidence, RejectsInvalidInputs) {
  EXPECT_THROW(combine_evidence(0.0, 0.0, 1.0, 1.0, {-0.1}),
               std::invalid_argument);
  EXPECT_THROW(combine_evidence(0.0, 0.0, 1.0, 1.0, {1.5}),
               std::invalid_argument);
  EXPECT_THROW(combine_evidence(0.0, 0.0, -1.0, 1.0, {0.5}),
               std::invalid_argument);
  // All posterior mass vanishing is a programming error upstream.
  EXPECT_THROW(combine_evidence(0.0, 0.0, 0.0, 1.0, {1.0}), std::logic_error);
}

TEST(BehaviorMode, MatchesBeliefExactly) {
  for (double ph : {0.0, 0.35, 0.8, 1.0}) {
    const ModeDistribution d = behavior_mode_distribution({ph});
    EXPECT_EQ(d.p(Intent::kHumanPriority), ph);
    EXPECT_EQ(d.p(Intent::kRobotPriority), 1.0 - ph);
  }
  EXPECT_THROW(behavior_mode_distribution({1.2}), std::invalid_argument);
}

TEST(MotionFunctional, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 0.5);
  const FeatureScales scales;
  for (int scene = 0; scene < 10; ++scene) {
    const testing::RandomScene s = testing::random_scene(rng, 6, false);
    for (Intent theta : {Intent::kHumanPriority, Intent::kRobotPriority}) {
      const MotionFunctional f =
          motion_reward_functional(theta, s.xi_r, s.xi_h, scales);
      VecX w = f.w_observed;
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) += gauss(rng);
      const VecX got = f.gradient(w);
      const VecX want = fd_gradient(f.value, w, 1e-6);
      EXPECT_LE(relative_error(got, want), 2e-6)
          << "scene " << scene << " intent " << to_string(theta);
    }
  }
}

TEST(MotionFunctional, MatchesExactRewardWhenWellSeparated) {
  // Far apart and moving fast, every smoothing term is in its saturated
  // regime, so the smoothed functional reproduces the exact reward.
  const HumanTrajectory xi_h = straight_human({0.0, 0.0, 0.3, 1.0}, 6);
  const RobotTrajectory xi_r = straight_robot({12.0, 6.0, M_PI / 2.0}, 1.8, 6);
  const FeatureScales scales;

  const double exact_h =
      expected_robot_reward(Intent::kHumanPriority, xi_r, xi_h, scales);
  const MotionFunctional fh = motion_reward_functional(
      Intent::kHumanPriority, xi_r, xi_h, scales);
  EXPECT_NE(exact_h, 0.0);
  EXPECT_NEAR(fh.value(fh.w_observed), exact_h, 1e-8 * std::abs(exact_h));

  const double exact_r =
      expected_robot_reward(Intent::kRobotPriority, xi_r, xi_h, scales);
  const MotionFunctional fr = motion_reward_functional(
      Intent::kRobotPriority, xi_r, xi_h, scales);
  // The absolute-value softening is the only residual gap at cruise speeds.
  EXPECT_NEAR(fr.value(fr.w_observed), exact_r, 0.025 * std::abs(exact_r));
}

TEST(MotionFunctional, ObservedControlsAreFiniteDifferenceVelocities) {
  const RobotTrajectory xi_r = straight_robot({1.0, 2.0, 0.0}, 0.8, 5);
  const HumanTrajectory xi_h = straight_human({0.0, 0.0, 0.0, 1.0}, 5);
  const MotionFunctional f = motion_reward_functional(
      Intent::kHumanPriority, xi_r, xi_h, FeatureScales{});
  ASSERT_EQ(f.w_observed.size(), 10);
  for (int t = 0; t < 5; ++t) {
    const Vec2 v = (xi_r.state(t + 1).pos() - xi_r.state(t).pos()) / xi_r.dt;
    EXPECT_NEAR(f.w_observed(2 * t), v.x(), 1e-12);
    EXPECT_NEAR(f.w_observed(2 * t + 1), v.y(), 1e-12);
  }
}

TEST(MotionFunctional, RejectsMisalignedHistories) {
  const RobotTrajectory xi_r = straight_robot({0.0, 0.0, 0.0}, 0.5, 4);
  const HumanTrajectory xi_h = straight_human({0.0, 2.0, 0.0, 1.0}, 6);
  EXPECT_THROW(motion_reward_functional(Intent::kHumanPriority, xi_r, xi_h,
                                        FeatureScales{}),
               std::invalid_argument);

  HumanTrajectory bad_dt = straight_human({0.0, 2.0, 0.0, 1.0}, 4, 0.25);
  EXPECT_THROW(motion_reward_functional(Intent::kHumanPriority, xi_r, bad_dt,
                                        FeatureScales{}),
               std::invalid_argument);

  RobotTrajectory empty;
  HumanTrajectory empty_h;
  empty.dt = empty_h.dt = 0.5;
  EXPECT_THROW(motion_reward_functional(Intent::kHumanPriority, empty, empty_h,
                                        FeatureScales{}),
               std::invalid_argument);
}

TEST(ImplicitLikelihood, QuadraticFunctionalMatchesGaussianIntegral) {
  // reward(w) = -1/2 (w-m)' Q (w-m) + c with Q diagonal: the normalizer is
  // the Gaussian integral exp(c) (2*pi)^{d/2} det(Q)^{-1/2} exactly.
  const int d = 4;
  VecX m(d), q(d);
  m << 0.3, -1.2, 0.8, 0.1;
  q << 2.0, 3.0, 4.0, 5.0;
  const double c = 0.7;
  const Objective reward = [&](const VecX& w) {
    return -0.5 * (w - m).dot(q.cwiseProduct(w - m)) + c;
  };
  const GradientFn grad = [&](const VecX& w) {
    return VecX(-q.cwiseProduct(w - m));
  };

  VecX w_obs(d);
  w_obs << 1.0, 0.0, -0.5, 0.4;
  const ImplicitEvidence ev = implicit_likelihood_from_functional(
      reward, grad, w_obs, VecX::Zero(d), 1e-3);

  const double log_z = c + 0.5 * d * std::log(2.0 * M_PI) -
                       0.5 * q.array().log().sum();
  EXPECT_NEAR(ev.log_likelihood, reward(w_obs) - log_z, 1e-6);
  EXPECT_FALSE(ev.regularized);
}

TEST(ImplicitLikelihood, FlatDirectionsAreClampedToUnitCurvature) {
  // One soft direction (curvature 0.1 < 1): the normalizer must price it as
  // if the curvature were 1, and report that it intervened.
  VecX q(2);
  q << 0.1, 2.0;
  const Objective reward = [&](const VecX& w) {
    return -0.5 * w.dot(q.cwiseProduct(w));
  };
  const GradientFn grad = [&](const VecX& w) {
    return VecX(-q.cwiseProduct(w));
  };

  VecX w_obs(2);
  w_obs << 0.2, -0.1;
  const ImplicitEvidence ev = implicit_likelihood_from_functional(
      reward, grad, w_obs, w_obs, 1.0);
  const double log_z =
      std::log(2.0 * M_PI) - 0.5 * (std::log(1.0) + std::log(2.0));
  EXPECT_NEAR(ev.log_likelihood, reward(w_obs) - log_z, 1e-6);
  EXPECT_TRUE(ev.regularized);
}

TEST(ImplicitLikelihood, UsesOnlyTheTrailingWindow) {
  // A 12-step history must score identically to its last `history_window`
  // steps handed over directly.
  const HumanTrajectory xi_h = straight_human({-2.0, 0.0, 1.0, 0.0}, 12);
  const RobotTrajectory xi_r = straight_robot({2.0, 3.0, -M_PI / 2.0}, 0.4, 12);

  IntentParams params;
  params.history_window = 6;

  HumanTrajectory tail_h;
  tail_h.dt = xi_h.dt;
  tail_h.start = xi_h.state(6);
  tail_h.steps.assign(xi_h.steps.begin() + 6, xi_h.steps.end());
  RobotTrajectory tail_r;
  tail_r.dt = xi_r.dt;
  tail_r.start = xi_r.state(6);
  tail_r.steps.assign(xi_r.steps.begin() + 6, xi_r.steps.end());

  const FeatureScales scales;
  for (Intent theta : {Intent::kHumanPriority, Intent::kRobotPriority}) {
    const ImplicitEvidence full =
        implicit_likelihood(theta, xi_r, xi_h, scales, params);
    const ImplicitEvidence tail =
        implicit_likelihood(theta, tail_r, tail_h, scales, params);
    EXPECT_NEAR(full.log_likelihood, tail.log_likelihood, 1e-12);
  }
}

TEST(ImplicitLikelihood, StoppedRobotNearCrossingHumanReadsAsYielding) {
  // The robot halts a meter from a pedestrian's crossing path. Holding still
  // is poor cruising, so the motion alone should favor human priority.
  const HumanTrajectory xi_h = straight_human({1.0, -1.5, 0.0, 1.0}, 6);
  const RobotTrajectory xi_r = stationary_robot({0.0, 0.0}, 0.0, 6);
  const FeatureScales scales;

  const ImplicitEvidence human = implicit_likelihood(
      Intent::kHumanPriority, xi_r, xi_h, scales);
  const ImplicitEvidence robot = implicit_likelihood(
      Intent::kRobotPriority, xi_r, xi_h, scales);
  EXPECT_GT(human.log_likelihood, robot.log_likelihood + 0.2);
}

TEST(ImplicitLikelihood, DistantRobotCarriesNoEvidence) {
  // Fifty meters away, the damped reward is flat in the robot's motion, so
  // neither hypothesis explains it better.
  const HumanTrajectory xi_h = straight_human({1.0, -1.5, 0.0, 1.0}, 6);
  const RobotTrajectory xi_r = stationary_robot({50.0, 0.0}, 0.0, 6);
  const FeatureScales scales;

  const ImplicitEvidence human = implicit_likelihood(
      Intent::kHumanPriority, xi_r, xi_h, scales);
  const ImplicitEvidence robot = implicit_likelihood(
      Intent::kRobotPriority, xi_r, xi_h, scales);
  EXPECT_NEAR(human.log_likelihood, robot.log_likelihood, 0.05);
}

TEST(IntentPosterior, MessageDropsBeliefThenMotionRestoresIt) {
  // The robot announces robot-priority while approaching, then stops short
  // of the pedestrian: belief in human priority should dip on the message
  // and recover once the stationary motion contradicts it.
  const double dt = 0.5;
  const int total = 16;
  const HumanTrajectory xi_h = straight_human({-2.0, 0.0, 1.0, 0.0}, total);

  RobotTrajectory xi_r;
  xi_r.dt = dt;
  xi_r.start = {1.0, 2.4, -M_PI / 2.0};
  {
    RobotState s = xi_r.start;
    const RobotControlBounds wide = testing::wide_robot_bounds();
    for (int t = 0; t < total; ++t) {
      const RobotAction a{t < 4 ? 0.6 : 0.0, 0.0};
      s = step_robot(s, a, dt, wide);
      xi_r.steps.emplace_back(s, a);
    }
  }

  const CommEvent comm{Intent::kRobotPriority, 0.5};
  const FeatureScales scales;
  std::vector<double> series;
  for (int k = 2; k <= total; k += 2) {
    RobotTrajectory rr;
    rr.dt = dt;
    rr.start = xi_r.start;
    rr.steps.assign(xi_r.steps.begin(), xi_r.steps.begin() + k);
    HumanTrajectory hh;
    hh.dt = dt;
    hh.start = xi_h.start;
    hh.steps.assign(xi_h.steps.begin(), xi_h.steps.begin() + k);

    const IntentBelief b =
        intent_posterior(comm, rr, hh, k * dt, scales);
    ASSERT_TRUE(b.valid());
    series.push_back(b.p_human_priority);
  }

  // Early: the fresh message dominates.
  EXPECT_LT(series.front(), 0.45);
  // The low point comes while the robot is still driving at the human.
  const auto low = std::min_element(series.begin(), series.end());
  EXPECT_LT(low - series.begin(), static_cast<long>(series.size()) - 1);
  // Late: the robot has been parked next to the crossing human for seconds.
  EXPECT_GT(series.back(), series.front() + 0.2);
  EXPECT_GT(series.back(), 0.5);
}

TEST(IntentPosterior, DiagnosticsExposeBothEvidenceChannels) {
  const HumanTrajectory xi_h = straight_human({1.0, -1.5, 0.0, 1.0}, 6);
  const RobotTrajectory xi_r = stationary_robot({0.0, 0.0}, 0.0, 6);
  const CommEvent comm{Intent::kRobotPriority, 0.0};

  PosteriorDiagnostics diag;
  const IntentBelief b = intent_posterior(comm, xi_r, xi_h, 1.0,
                                          FeatureScales{}, DecayParams{},
                                          IntentParams{}, IntentBelief{0.5},
                                          &diag);
  EXPECT_TRUE(b.valid());
  EXPECT_EQ(diag.explicit_human, 1.0);
  EXPECT_GT(diag.explicit_robot, 1.0);
  EXPECT_GT(diag.log_implicit_human, diag.log_implicit_robot);

  // The posterior is exactly the Bayes combination of the reported parts.
  const IntentBelief recombined =
      combine_evidence(diag.log_implicit_human, diag.log_implicit_robot,
                       diag.explicit_human, diag.explicit_robot, {0.5});
  EXPECT_NEAR(b.p_human_priority, recombined.p_human_priority, 1e-12);
}

}  // namespace
}  // namespace socnav
