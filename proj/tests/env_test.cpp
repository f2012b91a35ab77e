// Copyright 2026 The qctrl Authors
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

#include "qctrl/env.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qctrl/baselines.hpp"
#include "qctrl/errors.hpp"
#include "test_support.hpp"

namespace qctrl {
namespace {

EnvConfig two_level_task(int steps = 110) {
  return testing::make_env(LadderModel::regular(2, 0.1), steps);
}

TEST(EnvConfig, DefaultsAndValidation) {
  auto c = testing::make_env(LadderModel::regular(4, 0.8), 82);
  EXPECT_EQ(c.target(), 4);
  EXPECT_EQ(c.initial(), 1);
  EXPECT_DOUBLE_EQ(c.total_time(), 41.0);
  c.target_level = 5;
  EXPECT_THROW(c.validate(), DomainError);
  c.target_level = 0;
  c.steps = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Reset, GroundStateEncoding) {
  ControlEnv env(two_level_task());
  const auto obs = env.reset(42);
  Eigen::VectorXd want = Eigen::VectorXd::Zero(8);
  want(0) = 1.0;
  EXPECT_EQ(obs, want);
  EXPECT_EQ(env.seed(), 42u);
  EXPECT_EQ(env.fidelity(), 0.0);
  EXPECT_EQ(env.steps_taken(), 0);
}

TEST(Reset, ObservationLength) {
  ControlEnv env(testing::make_env(LadderModel::regular(4, 0.8), 82));
  EXPECT_EQ(env.reset().size(), 32);
  EXPECT_EQ(env.fidelity(), 0.0);
}

TEST(EncodeState, MaximallyMixedQubit) {
  Eigen::VectorXd want(8);
  want << 0.5, 0, 0, 0, 0, 0, 0.5, 0;
  EXPECT_EQ(encode_state(DensityMatrix::maximally_mixed(2)), want);
}

TEST(EncodeState, RowMajorRealImagPairs) {
  ComplexMatrix m(2, 2);
  m << 0.6, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.4;
  const auto obs = encode_state(DensityMatrix(m));
  Eigen::VectorXd want(8);
  want << 0.6, 0, 0.1, 0.2, 0.1, -0.2, 0.4, 0;
  EXPECT_EQ(obs, want);
}

TEST(EncodeState, DecodeRoundTripAndBounds) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = testing::random_state(rng, testing::uniform_int(rng, 2, 6));
    const auto obs = encode_state(rho);
    EXPECT_EQ(obs.size(), 2 * rho.dim() * rho.dim());
    EXPECT_LE(obs.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_EQ(decode_state({obs.data(), static_cast<std::size_t>(obs.size())}).matrix(),
              rho.matrix());
  }
  const std::vector<double> bad(7, 0.0);
  EXPECT_THROW(decode_state(bad), InvalidDimension);
}

TEST(Step, DriftFromGroundStateGivesNoReward) {
  ControlEnv env(testing::make_env(LadderModel::regular(4, 0.8), 5));
  env.reset();
  const auto r = env.step(0);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_FALSE(r.done);
}

TEST(Step, OneCoupledSliceMatchesRabiFormula) {
  ControlEnv env(two_level_task());
  env.reset();
  const auto r = env.step(1);
  const double g = 0.1, d = 0.5;
  const double want = g * g / (g * g + d * d) * std::pow(std::sin(std::sqrt(g * g + d * d) * 0.5), 2);
  EXPECT_NEAR(r.reward, want, 1e-12);
  EXPECT_NEAR(r.reward, 0.0024, 5e-5);  // two significant figures
  EXPECT_EQ(r.fidelity, env.fidelity());
}

TEST(Step, FinishedEpisodeRejected) {
  ControlEnv env(two_level_task(3));
  env.reset();
  EXPECT_FALSE(env.step(1).done);
  EXPECT_FALSE(env.step(0).done);
  EXPECT_TRUE(env.step(1).done);
  EXPECT_THROW(env.step(0), ProtocolViolation);
  EXPECT_THROW(ControlEnv(two_level_task()).step(2), DomainError);
}

TEST(EnvProperty, TelescopingRewardsAndFixedLength) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::uniform_int(rng, 2, 5);
    const int steps = testing::uniform_int(rng, 1, 60);
    ControlEnv env(testing::make_env(testing::random_model(rng, n, trial % 2 == 0), steps));
    env.reset();
    const double f0 = env.fidelity();
    double total = 0.0;
    int taken = 0;
    bool done = false;
    while (!done) {
      const auto r = env.step(testing::uniform_int(rng, 0, 1));
      total += r.reward;
      done = r.done;
      ++taken;
      EXPECT_LE(r.observation.cwiseAbs().maxCoeff(), 1.0);
    }
    EXPECT_EQ(taken, steps);
    EXPECT_NEAR(total, env.fidelity() - f0, 1e-12);
  }
}

TEST(RunProtocol, AllOffIsFlat) {
  const auto cfg = testing::make_env(LadderModel::regular(4, 0.8), 20);
  const auto t = run_protocol(cfg, Protocol{std::vector<double>(20, 0.0)});
  ASSERT_EQ(t.fidelity.size(), 21u);
  for (double f : t.fidelity) EXPECT_EQ(f, 0.0);
}

TEST(RunProtocol, MatchesSteppingTheEnv) {
  std::mt19937_64 rng(3);
  const auto cfg = testing::make_env(LadderModel::regular(3, 0.5, 0.01, 0.02), 30);
  const auto actions = testing::random_actions(rng, 30);
  const auto t = run_protocol(cfg, Protocol::from_actions(actions, 0.5));
  ControlEnv env(cfg);
  env.reset();
  for (std::size_t k = 0; k < actions.size(); ++k) {
    env.step(actions[k]);
    EXPECT_EQ(t.fidelity[k + 1], env.fidelity());
  }
  EXPECT_EQ(t.final_fidelity, env.fidelity());
}

TEST(RunProtocol, ContinuousModeAgreesWithBinaryAtEndpoints) {
  std::mt19937_64 rng(4);
  const auto cfg = testing::make_env(LadderModel::regular(3, 0.5, 0.01), 25);
  auto p = Protocol::from_actions(testing::random_actions(rng, 25), 0.5);
  const auto binary = run_protocol(cfg, p);
  p.mode = ProtocolMode::kContinuous;
  EXPECT_NEAR(run_protocol(cfg, p).final_fidelity, binary.final_fidelity, 1e-13);
}

TEST(RunProtocol, GreedyTwoLevelFidelity) {
  const auto cfg = two_level_task();
  const auto t = run_protocol(cfg, run_greedy(cfg).protocol);
  EXPECT_NEAR(t.final_fidelity, 0.999815, 5e-6);
}

TEST(RunProtocol, RejectsBadProtocols) {
  const auto cfg = two_level_task(4);
  EXPECT_THROW(run_protocol(cfg, Protocol{{0.0, 0.1}}), InvalidDimension);
  EXPECT_THROW(run_protocol(cfg, Protocol{{0.0, 0.1, 0.05, 0.0}}), DomainError);
  EXPECT_THROW(run_protocol(cfg, Protocol{{0.0, 0.1, 0.2, 0.0}, ProtocolMode::kContinuous}),
               DomainError);
}

TEST(RunProtocol, Deterministic) {
  std::mt19937_64 rng(5);
  const auto cfg = testing::make_env(LadderModel::regular(4, 0.8, 0.01), 40);
  const auto p = Protocol::from_actions(testing::random_actions(rng, 40), 0.8);
  EXPECT_EQ(run_protocol(cfg, p).fidelity, run_protocol(cfg, p).fidelity);
}

TEST(Protocol, JsonRoundTrip) {
  const Protocol p{{0.0, 0.25, 0.5}, ProtocolMode::kContinuous};
  EXPECT_EQ(nlohmann::json(p).get<Protocol>(), p);
  const std::vector<int> a{1, 0, 1};
  EXPECT_EQ(Protocol::from_actions(a, 0.3).actions(), a);
}

}  // namespace
}  // namespace qctrl
