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

#include "qctrl/dppo.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "qctrl/errors.hpp"
#include "qctrl/parallel.hpp"

namespace qctrl::dppo {

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kActorInitTag = 1;
constexpr std::uint64_t kCriticInitTag = 2;
constexpr std::uint64_t kRolloutTag = 3;

Eigen::MatrixXd as_column(const Observation& obs) { return obs; }

}  // namespace

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& gradient, AdamState& state,
                 const AdamConfig& config) {
  if (gradient.size() != params.size()) throw InvalidDimension("adam_update: shape mismatch");
  if (state.first_moment.size() != params.size()) state = AdamState(params.size());
  ++state.step;
  state.first_moment = config.beta1 * state.first_moment + (1.0 - config.beta1) * gradient;
  state.second_moment =
      config.beta2 * state.second_moment + (1.0 - config.beta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  params.array() -= config.learning_rate * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + config.epsilon);
}

ActorCriticParams ActorCriticParams::create(int inputs, int width, int depth, std::uint64_t seed,
                                            double head_scale) {
  ActorCriticParams p;
  p.actor = Mlp(inputs, width, depth, 2);
  p.critic = Mlp(inputs, width, depth, 1);
  auto actor_rng = make_stream(seed, 0, 0, kActorInitTag);
  auto critic_rng = make_stream(seed, 0, 0, kCriticInitTag);
  p.actor.initialize(actor_rng, head_scale);
  p.critic.initialize(critic_rng, head_scale);
  p.actor_opt = AdamState(p.actor.parameter_count());
  p.critic_opt = AdamState(p.critic.parameter_count());
  return p;
}

Eigen::MatrixXd log_softmax2(const Eigen::MatrixXd& logits) {
  if (logits.rows() != 2) throw InvalidDimension("log_softmax2: expected two logits");
  Eigen::MatrixXd out(2, logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double a = logits(0, j);
    const double b = logits(1, j);
    const double m = std::max(a, b);
    const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    out(0, j) = a - lse;
    out(1, j) = b - lse;
  }
  return out;
}

ActionProbs policy_forward(const ActorCriticParams& params, const Observation& obs) {
  if (obs.size() != params.actor.inputs())
    throw InvalidDimension("policy_forward: observation size mismatch");
  const Eigen::MatrixXd lp = log_softmax2(params.actor.forward(as_column(obs)));
  return {std::exp(lp(1, 0)), std::exp(lp(0, 0))};
}

double log_prob(const ActorCriticParams& params, const Observation& obs, int action) {
  if (action != 0 && action != 1) throw DomainError("log_prob: action must be 0 or 1");
  if (obs.size() != params.actor.inputs())
    throw InvalidDimension("log_prob: observation size mismatch");
  return log_softmax2(params.actor.forward(as_column(obs)))(action, 0);
}

double value_forward(const ActorCriticParams& params, const Observation& obs) {
  if (obs.size() != params.critic.inputs())
    throw InvalidDimension("value_forward: observation size mismatch");
  return params.critic.forward(as_column(obs))(0, 0);
}

RolloutBatch collect_rollouts(const ActorCriticParams& snapshot, const EnvConfig& config,
                              const std::shared_ptr<const BangBangPropagators>& propagators,
                              const RolloutOptions& options) {
  if (options.workers < 1) throw DomainError("collect_rollouts: need at least one worker");
  const int workers = options.workers;
  std::vector<std::vector<Transition>> episodes(workers);
  std::vector<std::vector<int>> actions(workers);
  std::vector<double> finals(workers, 0.0);

  parallel_for(workers, resolve_threads(options.max_threads), [&](int w) {
    ControlEnv env(config, propagators);
    auto rng = make_stream(options.seed, options.iteration, static_cast<std::uint64_t>(w),
                           kRolloutTag);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Observation obs = env.reset(options.seed);
    auto& steps = episodes[w];
    steps.reserve(config.steps);
    while (!env.done()) {
      const Eigen::MatrixXd lp = log_softmax2(snapshot.actor.forward(as_column(obs)));
      const int action = uniform(rng) < std::exp(lp(1, 0)) ? 1 : 0;
      Transition t;
      t.observation = obs;
      t.action = action;
      t.log_prob_old = lp(action, 0);
      t.value_estimate = snapshot.critic.forward(as_column(obs))(0, 0);
      if (!std::isfinite(t.log_prob_old) || !std::isfinite(t.value_estimate))
        throw NumericalError("collect_rollouts: non-finite network output");
      const auto r = env.step(action);
      t.reward = r.reward;
      obs = r.observation;
      steps.push_back(std::move(t));
      actions[w].push_back(action);
    }
    finals[w] = env.fidelity();
  });

  RolloutBatch batch;
  const auto inputs = snapshot.actor.inputs();
  std::size_t total = 0;
  for (const auto& e : episodes) total += e.size();
  batch.transitions.reserve(total);
  batch.observations.resize(inputs, static_cast<Eigen::Index>(total));
  for (int w = 0; w < workers; ++w) {
    batch.episode_starts.push_back(batch.transitions.size());
    for (auto& t : episodes[w]) {
      batch.observations.col(static_cast<Eigen::Index>(batch.transitions.size())) = t.observation;
      batch.transitions.push_back(std::move(t));
    }
  }
  batch.episode_actions = std::move(actions);
  batch.final_fidelities = std::move(finals);
  return batch;
}

void compute_returns_advantages(RolloutBatch& batch, double discount, bool normalize_advantages) {
  const auto size = static_cast<Eigen::Index>(batch.size());
  batch.returns.resize(size);
  batch.advantages.resize(size);
  batch.value_targets.resize(size);
  for (std::size_t e = 0; e < batch.episodes(); ++e) {
    double g = 0.0;
    for (std::size_t i = batch.episode_end(e); i-- > batch.episode_starts[e];) {
      g = batch.transitions[i].reward + discount * g;
      const auto k = static_cast<Eigen::Index>(i);
      batch.returns[k] = g;
      batch.advantages[k] = g - batch.transitions[i].value_estimate;
      batch.value_targets[k] = batch.advantages[k] + batch.transitions[i].value_estimate;
    }
  }
  if (normalize_advantages && size > 1) {
    const double mean = batch.advantages.mean();
    const double var = (batch.advantages.array() - mean).square().sum() / (size - 1);
    batch.advantages = (batch.advantages.array() - mean) / (std::sqrt(var) + 1e-8);
  }
}

double clip(double x, double lo, double hi) {
  if (lo > hi) throw DomainError("clip: lower bound exceeds upper bound");
  return std::min(std::max(x, lo), hi);
}

LossAndGradient ppo_surrogate_loss(const ActorCriticParams& params, const RolloutBatch& batch,
                                   double clip_eps) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  if (b == 0) throw InvalidDimension("ppo_surrogate_loss: empty batch");
  if (batch.advantages.size() != b)
    throw InvalidDimension("ppo_surrogate_loss: advantages missing");
  Mlp::Tape tape;
  const Eigen::MatrixXd logits = params.actor.forward(batch.observations, tape);
  const Eigen::MatrixXd lp = log_softmax2(logits);
  Eigen::MatrixXd grad_logits(2, b);
  double objective = 0.0;
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto& t = batch.transitions[static_cast<std::size_t>(j)];
    const double adv = batch.advantages[j];
    const double ratio = std::exp(lp(t.action, j) - t.log_prob_old);
    const double unclipped = ratio * adv;
    const double clipped = clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * adv;
    objective += std::min(unclipped, clipped);
    // d(min)/d(log pi): the unclipped branch carries ratio * adv, the clipped
    // branch is constant in the parameters.
    const double dlogp = unclipped <= clipped ? unclipped : 0.0;
    for (int k = 0; k < 2; ++k) {
      const double indicator = (k == t.action) ? 1.0 : 0.0;
      grad_logits(k, j) = -dlogp * (indicator - std::exp(lp(k, j))) / static_cast<double>(b);
    }
  }
  LossAndGradient out;
  out.loss = -objective / static_cast<double>(b);
  out.gradient = params.actor.backward(tape, grad_logits);
  return out;
}

LossAndGradient critic_loss(const ActorCriticParams& params, const RolloutBatch& batch) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  if (b == 0) throw InvalidDimension("critic_loss: empty batch");
  if (batch.value_targets.size() != b) throw InvalidDimension("critic_loss: targets missing");
  Mlp::Tape tape;
  const Eigen::MatrixXd values = params.critic.forward(batch.observations, tape);
  const Eigen::RowVectorXd diff = batch.value_targets.transpose() - values.row(0);
  LossAndGradient out;
  out.loss = diff.squaredNorm() / static_cast<double>(b);
  out.gradient = params.critic.backward(tape, -2.0 * diff / static_cast<double>(b));
  return out;
}

void TrainConfig::validate() const {
  if (workers < 1) throw DomainError("train: workers must be >= 1");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw DomainError("train: clip_eps must be in (0, 1)");
  if (!(discount > 0.0 && discount <= 1.0)) throw DomainError("train: discount must be in (0, 1]");
  if (!(learning_rate > 0.0)) throw DomainError("train: learning_rate must be positive");
  if (update_epochs < 1) throw DomainError("train: update_epochs must be >= 1");
  if (iterations < 0) throw DomainError("train: iterations must be >= 0");
  if (hidden_depth < 0 || (hidden_depth > 0 && hidden_width < 1))
    throw DomainError("train: invalid hidden layer shape");
}

namespace {

std::vector<int> argmax_actions(const ActorCriticParams& params, const EnvConfig& config,
                                const std::shared_ptr<const BangBangPropagators>& props,
                                double& final_fidelity) {
  ControlEnv env(config, props);
  Observation obs = env.reset();
  std::vector<int> actions;
  actions.reserve(config.steps);
  while (!env.done()) {
    const auto p = policy_forward(params, obs);
    const int a = p.on > p.off ? 1 : 0;
    actions.push_back(a);
    obs = env.step(a).observation;
  }
  final_fidelity = env.fidelity();
  return actions;
}

}  // namespace

TrainResult train(const TrainConfig& config, const EnvConfig& env_config,
                  const IterationCallback& on_iteration) {
  config.validate();
  env_config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto props =
      std::make_shared<const BangBangPropagators>(make_bang_bang(env_config.model, env_config.dt));
  const int n = env_config.model.levels();
  const double gamma_max = env_config.model.gamma_max;

  TrainResult result;
  result.params = ActorCriticParams::create(2 * n * n, config.hidden_width, config.hidden_depth,
                                            config.seed, config.head_scale);
  auto& params = result.params;
  const AdamConfig adam{config.learning_rate};

  std::vector<int> best_actions;
  double best = -1.0;
  auto consider = [&](const std::vector<int>& actions, double f, std::int64_t episodes) {
    if (f > best) {
      best = f;
      best_actions = actions;
      result.episodes_to_best = episodes;
    }
  };

  std::int64_t episodes = 0;
  for (int it = 0; it < config.iterations; ++it) {
    RolloutOptions ro;
    ro.workers = config.workers;
    ro.seed = config.seed;
    ro.iteration = static_cast<std::uint64_t>(it);
    ro.max_threads = config.max_threads;
    RolloutBatch batch = collect_rollouts(params, env_config, props, ro);
    double mean_f = 0.0;
    for (std::size_t e = 0; e < batch.episodes(); ++e) {
      ++episodes;
      consider(batch.episode_actions[e], batch.final_fidelities[e], episodes);
      mean_f += batch.final_fidelities[e];
    }
    mean_f /= static_cast<double>(batch.episodes());

    compute_returns_advantages(batch, config.discount, config.normalize_advantages);

    for (int epoch = 0; epoch < config.update_epochs; ++epoch) {
      const auto actor = ppo_surrogate_loss(params, batch, config.clip_eps);
      const auto critic = critic_loss(params, batch);
      if (!std::isfinite(actor.loss) || !std::isfinite(critic.loss) ||
          !actor.gradient.allFinite() || !critic.gradient.allFinite()) {
        std::ostringstream msg;
        msg << "train: non-finite loss at iteration " << it << ", epoch " << epoch
            << " (actor loss " << actor.loss << ", critic loss " << critic.loss << ")";
        throw NumericalError(msg.str());
      }
      adam_update(params.actor.parameters(), actor.gradient, params.actor_opt, adam);
      adam_update(params.critic.parameters(), critic.gradient, params.critic_opt, adam);
    }

    double greedy_f = 0.0;
    const auto greedy = argmax_actions(params, env_config, props, greedy_f);
    // The readout is an executed episode too, so it counts toward the budget.
    ++episodes;
    consider(greedy, greedy_f, episodes);

    CurvePoint point;
    point.iteration = it + 1;
    point.episodes = episodes;
    point.mean_fidelity = mean_f;
    point.best_fidelity = best;
    if (config.record_wall_time)
      point.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.curve.push_back(point);
    if (on_iteration) on_iteration(point, params);
  }

  double final_f = 0.0;
  const auto final_actions = argmax_actions(params, env_config, props, final_f);
  if (config.iterations == 0) consider(final_actions, final_f, episodes);
  result.final_protocol = Protocol::from_actions(final_actions, gamma_max);
  result.final_fidelity = final_f;
  result.best_protocol = Protocol::from_actions(best_actions, gamma_max);
  result.best_fidelity = best;
  result.episodes = episodes;
  return result;
}

void write_learning_curve(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "iteration,episodes_so_far,mean_fidelity,best_fidelity,wall_seconds\n";
  out.precision(17);
  for (const auto& p : curve)
    out << p.iteration << ',' << p.episodes << ',' << p.mean_fidelity << ',' << p.best_fidelity
        << ',' << p.wall_seconds << '\n';
}

}  // namespace qctrl::dppo
