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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Criteria can be selected by number
// on the command line; the default is all of them.
//
// Every tolerance and budget is pinned below. The experiment-scale criteria
// run the shipped configs/ through the experiment driver, so what passes here
// is what `qctrl run` reproduces.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qctrl/baselines.hpp"
#include "qctrl/bench.hpp"
#include "qctrl/dppo.hpp"
#include "qctrl/env.hpp"
#include "qctrl/lindblad.hpp"
#include "qctrl/two_level.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace qctrl::acceptance {
namespace {

// --- pinned tolerances and budgets ---------------------------------------------

// 1. Physics oracle suite.
constexpr int kOracleTriples = 100;
constexpr double kOracleTol = 1e-8;
constexpr int kPhysicalTrajectories = 1000;
constexpr double kC1Seconds = 60;

// 2. Analytic decay and dephasing.
constexpr double kAnalyticTol = 1e-8;
constexpr double kAnalyticHorizon = 50;

// 3. Gradient suite.
constexpr double kGradientTol = 1e-4;
constexpr double kC3Seconds = 120;

// 4. Two-level reproduction.
constexpr double kTwoLevelGreedy = 0.9998;
constexpr double kTwoLevelGreedyTol = 5e-4;
constexpr double kTwoLevelRlFloor = 0.999;
constexpr std::int64_t kTwoLevelEpisodeBudget = 1500;
constexpr std::size_t kTwoLevelSeeds = 5;
constexpr double kC4Seconds = 15 * 60;

// 5. Multi-level closed systems.
constexpr double kN4Greedy = 0.954;
constexpr double kN4GreedyTol = 0.02;
constexpr double kN4RlFloor = 0.97;
constexpr double kN10Greedy = 0.411;
constexpr double kN10GreedyTol = 0.05;
constexpr double kN10RlMargin = 0.3;
constexpr double kC5Seconds = 2 * 3600;

// 6. Dissipative ordering.
constexpr double kMonotoneSlack = 0.02;
const std::vector<double> kNoiseGrid{0.05, 0.06, 0.07, 0.08, 0.09, 0.1};

// 7. Exhaustive oracle.
constexpr int kOracleInstances = 20;
constexpr int kOracleMaxSteps = 12;
constexpr double kRelaxationSlack = 1e-9;
// Random starts for GRAPE on these small instances. With 8, one of the 20
// ends in a local optimum below the binary optimum; 32 already clears all.
constexpr int kOracleGrapeRestarts = 128;
constexpr double kC7Seconds = 10 * 60;

// --- plumbing ------------------------------------------------------------------

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string violations;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      violations += " [violated: " + what + "]";
    }
  }
};

using Seconds = std::chrono::duration<double>;

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::path(QCTRL_ACCEPTANCE_OUT) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bench::RunSummary run_config(const std::string& file, const std::string& out_name) {
  const auto config = bench::load_config((fs::path(QCTRL_CONFIG_DIR) / file).string());
  bench::RunOptions options;
  options.output_dir = work_dir(out_name).string();
  options.on_record = [](const bench::ResultRecord& r) {
    std::cerr << "    " << r.method << "  " << r.task_id;
    if (r.seed) std::cerr << "  seed=" << *r.seed;
    if (r.kind != "cell") std::cerr << "  [" << r.kind << "]";
    std::cerr << "  F=" << fmt(r.best_fidelity) << '\n';
  };
  return bench::run_experiment(config, options);
}

/// Best fidelity per (task id, method); RL uses the best-of-seeds aggregate.
std::map<std::string, std::map<std::string, const bench::ResultRecord*>> headline(
    const bench::RunSummary& s) {
  std::map<std::string, std::map<std::string, const bench::ResultRecord*>> out;
  for (const auto& r : s.records) {
    if (r.method == "rl" && r.kind != "best-of-seeds") continue;
    auto& slot = out[r.task_id][r.method];
    if (!slot || r.best_fidelity > slot->best_fidelity) slot = &r;
  }
  return out;
}

void require_no_failures(Outcome& o, const bench::RunSummary& s) {
  for (const auto& f : s.failures)
    o.require(false, f.method + " on " + f.task_id + " failed: " + f.error);
}

double get(const std::map<std::string, const bench::ResultRecord*>& row, const std::string& m,
           Outcome& o, const std::string& task) {
  const auto it = row.find(m);
  if (it == row.end()) {
    o.require(false, "no " + m + " record for " + task);
    return std::nan("");
  }
  return it->second->best_fidelity;
}

// --- criteria ------------------------------------------------------------------

void physics_oracles(Outcome& o) {
  std::mt19937_64 rng(20260101);
  double worst = 0.0;
  for (int trial = 0; trial < kOracleTriples; ++trial) {
    // (omega, gamma, t) triples; the ladder offset E1 only adds a global phase.
    const double omega = testing::uniform(rng, 0.05, 3.0);
    const double gamma = testing::uniform(rng, 0.0, 1.5);
    const double t = testing::uniform(rng, 0.01, 30.0);
    const double e1 = testing::uniform(rng, -2.0, 2.0);
    const two_level::Params p{omega, gamma, testing::uniform(rng, 0, M_PI),
                              testing::uniform(rng, 0, 2 * M_PI)};
    const LadderModel m{{e1, e1 + omega}, gamma};
    const auto psi = p.initial_state();
    const DensityMatrix rho(ComplexMatrix(psi * psi.adjoint()));
    const auto u = two_level::propagator(p, t);
    const ComplexMatrix oracle = u * rho.matrix() * u.adjoint();
    const auto got = propagate(rho, exponentiate(build_liouvillian(m, gamma), t));
    worst = std::max(worst, (got.matrix() - oracle).cwiseAbs().maxCoeff());
  }
  o.require(worst <= kOracleTol, "closed-form mismatch " + fmt(worst));

  int invalid = 0;
  double worst_trace = 0.0, worst_herm = 0.0, min_eig = 1.0;
  for (int trial = 0; trial < kPhysicalTrajectories; ++trial) {
    const int n = testing::uniform_int(rng, 2, 5);
    const auto model = testing::random_model(rng, n, true);
    const auto props = make_bang_bang(model, 0.5);
    auto rho = testing::random_state(rng, n);
    const int steps = testing::uniform_int(rng, 1, 110);
    for (int k = 0; k < steps; ++k) rho = propagate(rho, props[testing::uniform_int(rng, 0, 1)]);
    const auto d = diagnose_state(rho.matrix());
    worst_trace = std::max(worst_trace, d.trace_error);
    worst_herm = std::max(worst_herm, d.hermiticity_error);
    min_eig = std::min(min_eig, d.min_eigenvalue);
    if (!d.valid()) ++invalid;
  }
  o.require(invalid == 0, std::to_string(invalid) + " unphysical trajectories");
  o.detail << "closed-form max err " << fmt(worst, 3) << " over " << kOracleTriples
           << " triples; " << kPhysicalTrajectories << " dissipative trajectories: trace err "
           << fmt(worst_trace, 3) << ", herm err " << fmt(worst_herm, 3) << ", min eig "
           << fmt(min_eig, 3);
}

void analytic_decay(Outcome& o) {
  double worst = 0.0;
  for (double rate : {0.0025, 0.01, 0.05}) {
    for (int n : {2, 4, 6}) {
      // Decay: the top level empties as e^{-rate t}, coupling off.
      const auto decay = build_liouvillian(LadderModel::regular(n, 0.8, 0.0, rate), 0.0);
      // Dephasing: the 1-2 coherence shrinks as e^{-rate t}.
      const auto dephase = build_liouvillian(LadderModel::regular(n, 0.8, rate, 0.0), 0.0);
      ComplexMatrix coherent = ComplexMatrix::Identity(n, n) / n;
      coherent(0, 1) = Complex(0.3 / n, 0.4 / n);
      coherent(1, 0) = std::conj(coherent(0, 1));
      const DensityMatrix start_coherent(coherent);
      const auto top = DensityMatrix::basis(n, n);
      for (double t = 0.0; t <= kAnalyticHorizon + 1e-12; t += 0.5) {
        if (t > 0) {
          const auto a = propagate(top, exponentiate(decay, t));
          worst = std::max(worst, std::abs(a(n - 1, n - 1).real() - std::exp(-rate * t)));
          const auto b = propagate(start_coherent, exponentiate(dephase, t));
          worst = std::max(worst, std::abs(std::abs(b(0, 1)) - std::abs(coherent(0, 1)) *
                                                                    std::exp(-rate * t)));
        }
      }
      // Same laws when stepping slice by slice, as the environment does.
      const auto step_decay = exponentiate(decay, 0.5);
      const auto step_dephase = exponentiate(dephase, 0.5);
      auto a = top;
      auto b = start_coherent;
      for (int k = 1; k <= static_cast<int>(kAnalyticHorizon / 0.5); ++k) {
        a = propagate(a, step_decay);
        b = propagate(b, step_dephase);
        const double t = 0.5 * k;
        worst = std::max(worst, std::abs(a(n - 1, n - 1).real() - std::exp(-rate * t)));
        worst = std::max(worst, std::abs(std::abs(b(0, 1)) - std::abs(coherent(0, 1)) *
                                                                  std::exp(-rate * t)));
      }
    }
  }
  o.require(worst <= kAnalyticTol, "analytic mismatch " + fmt(worst));
  o.detail << "max deviation " << fmt(worst, 3) << " over t in [0, " << kAnalyticHorizon
           << "], n in {2,4,6}, three rates";
}

dppo::ActorCriticParams random_params(int inputs, std::uint64_t seed) {
  auto p = dppo::ActorCriticParams::create(inputs, 8, 2, seed, 1.0);
  std::mt19937_64 rng(seed + 7);
  for (int l = 0; l < p.actor.layers(); ++l) {
    for (auto& b : p.actor.bias(l)) b = testing::uniform(rng, -0.2, 0.2);
    for (auto& b : p.critic.bias(l)) b = testing::uniform(rng, -0.2, 0.2);
  }
  return p;
}

/// Batch from real rollouts, with perturbed old log-probs so some ratios land
/// outside the clip range.
dppo::RolloutBatch random_batch(const dppo::ActorCriticParams& p, const EnvConfig& env,
                                std::mt19937_64& rng) {
  dppo::RolloutOptions ro;
  ro.workers = 2;
  ro.seed = rng();
  ro.max_threads = 1;
  auto batch = dppo::collect_rollouts(p, env, std::make_shared<BangBangPropagators>(
                                                  make_bang_bang(env.model, env.dt)),
                                      ro);
  for (auto& t : batch.transitions) t.log_prob_old += testing::uniform(rng, -0.4, 0.4);
  dppo::compute_returns_advantages(batch, 0.85, true);
  return batch;
}

void gradients(Outcome& o) {
  std::mt19937_64 rng(33);
  double actor = 0.0, critic = 0.0, grape = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = testing::uniform_int(rng, 2, 3);
    const auto env = testing::make_env(testing::random_model(rng, n, trial % 2), 4);
    const auto p = random_params(2 * n * n, 100 + trial);
    const auto batch = random_batch(p, env, rng);

    const auto a = dppo::ppo_surrogate_loss(p, batch, 0.2);
    auto fa = [&](const Eigen::VectorXd& x) {
      auto q = p;
      q.actor.parameters() = x;
      return dppo::ppo_surrogate_loss(q, batch, 0.2).loss;
    };
    actor = std::max(actor, testing::relative_error(
                                a.gradient, testing::central_difference(fa, p.actor.parameters(), 1e-5)));

    const auto c = dppo::critic_loss(p, batch);
    auto fc = [&](const Eigen::VectorXd& x) {
      auto q = p;
      q.critic.parameters() = x;
      return dppo::critic_loss(q, batch).loss;
    };
    critic = std::max(critic, testing::relative_error(
                                  c.gradient, testing::central_difference(fc, p.critic.parameters(), 1e-5)));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::uniform_int(rng, 2, 5);
    const auto env = testing::make_env(testing::random_model(rng, n, trial % 2),
                                       testing::uniform_int(rng, 1, 20));
    Protocol prot{{}, ProtocolMode::kContinuous};
    for (int i = 0; i < env.steps; ++i)
      prot.amplitudes.push_back(testing::uniform(rng, 0, env.model.gamma_max));
    const auto adj = grape_gradient(prot, env, GradientMode::kAdjoint);
    const auto fd = grape_gradient(prot, env, GradientMode::kFiniteDifference);
    grape = std::max(grape, testing::relative_error(Eigen::Map<const Eigen::VectorXd>(adj.data(), adj.size()),
                                                    Eigen::Map<const Eigen::VectorXd>(fd.data(), fd.size())));
  }
  o.require(actor <= kGradientTol, "actor gradient rel err " + fmt(actor));
  o.require(critic <= kGradientTol, "critic gradient rel err " + fmt(critic));
  o.require(grape <= kGradientTol, "GRAPE gradient rel err " + fmt(grape));
  o.detail << "max rel err: actor " << fmt(actor, 3) << ", critic " << fmt(critic, 3)
           << ", GRAPE adjoint " << fmt(grape, 3) << " (10 + 10 + 50 random instances)";
}

void two_level_reproduction(Outcome& o) {
  const auto s = run_config("two_level.json", "two_level");
  require_no_failures(o, s);
  double greedy = std::nan("");
  int seeds = 0, hits = 0;
  double best = 0.0;
  std::int64_t best_episodes = 0;
  for (const auto& r : s.records) {
    if (r.method == "greedy") greedy = r.best_fidelity;
    if (r.method != "rl" || r.kind != "cell") continue;
    ++seeds;
    o.require(r.episodes_or_iterations <= kTwoLevelEpisodeBudget,
              "seed " + std::to_string(r.seed.value_or(0)) + " used " +
                  std::to_string(r.episodes_or_iterations) + " episodes");
    if (r.best_fidelity >= kTwoLevelRlFloor && r.episodes_to_best <= kTwoLevelEpisodeBudget) ++hits;
    if (r.best_fidelity > best) {
      best = r.best_fidelity;
      best_episodes = r.episodes_to_best;
    }
  }
  o.require(std::abs(greedy - kTwoLevelGreedy) <= kTwoLevelGreedyTol, "greedy " + fmt(greedy));
  o.require(seeds == static_cast<int>(kTwoLevelSeeds), std::to_string(seeds) + " RL seeds");
  o.require(hits >= 1, "no seed reached " + fmt(kTwoLevelRlFloor));
  o.detail << "greedy " << fmt(greedy, 7) << "; RL best " << fmt(best, 7) << " at episode "
           << best_episodes << ", " << hits << "/" << seeds << " seeds >= " << kTwoLevelRlFloor;
}

void closed_grid(Outcome& o) {
  const auto s = run_config("closed_grid.json", "closed_grid");
  require_no_failures(o, s);
  const auto h = headline(s);
  o.require(h.size() == 4, std::to_string(h.size()) + " closed tasks");
  for (const auto& [task, row] : h) {
    const double g = get(row, "greedy", o, task);
    const double r = get(row, "rl", o, task);
    const double q = get(row, "grape", o, task);
    o.require(q >= r, task + ": GRAPE " + fmt(q) + " < RL " + fmt(r));
    o.require(r >= g, task + ": RL " + fmt(r) + " < greedy " + fmt(g));
    o.detail << task << " greedy/RL/GRAPE " << fmt(g, 4) << "/" << fmt(r, 4) << "/"
             << fmt(q, 4) << "; ";
  }
  if (h.count("n4")) {
    const double g = get(h.at("n4"), "greedy", o, "n4");
    o.require(std::abs(g - kN4Greedy) <= kN4GreedyTol, "n4 greedy " + fmt(g));
    o.require(get(h.at("n4"), "rl", o, "n4") >= kN4RlFloor, "n4 RL below " + fmt(kN4RlFloor));
  } else {
    o.require(false, "task n4 missing");
  }
  if (h.count("n10")) {
    const double g = get(h.at("n10"), "greedy", o, "n10");
    o.require(std::abs(g - kN10Greedy) <= kN10GreedyTol, "n10 greedy " + fmt(g));
    o.require(get(h.at("n10"), "rl", o, "n10") >= g + kN10RlMargin, "n10 RL below greedy + 0.3");
  } else {
    o.require(false, "task n10 missing");
  }
}

/// RL >= greedy on every cell; each method non-increasing along the grid.
void noise_grid(Outcome& o, const std::string& file, const std::string& label) {
  const auto s = run_config(file, label);
  require_no_failures(o, s);
  const auto h = headline(s);
  // method -> sqrt rate -> fidelity
  std::map<std::string, std::map<double, double>> curves;
  int cells = 0;
  for (const auto& [task, row] : h) {
    const double g = get(row, "greedy", o, task);
    const double r = get(row, "rl", o, task);
    o.require(r >= g, task + ": RL " + fmt(r) + " < greedy " + fmt(g));
    ++cells;
    for (const auto& [method, rec] : row) curves[method][rec->task.sqrt_rate] = rec->best_fidelity;
  }
  o.require(cells == static_cast<int>(kNoiseGrid.size()),
            label + " has " + std::to_string(cells) + " cells");
  o.detail << label << ":";
  for (const auto& [method, curve] : curves) {
    double prev = 2.0, worst_rise = 0.0;
    o.detail << " " << method;
    for (const auto& [rate, f] : curve) {
      worst_rise = std::max(worst_rise, f - prev);
      prev = f;
      o.detail << " " << fmt(f, 4);
    }
    o.require(worst_rise <= kMonotoneSlack, label + " " + method + " rises by " + fmt(worst_rise));
    o.detail << ";";
  }
  o.detail << " ";
}

void dissipative_ordering(Outcome& o) {
  noise_grid(o, "dephasing_grid.json", "dephasing");
  noise_grid(o, "decay_grid.json", "decay");
}

void exhaustive_oracle(Outcome& o) {
  std::mt19937_64 rng(77);
  double worst_relaxation = 1.0;
  int rl_hits = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const int n = testing::uniform_int(rng, 2, 4);
    auto model = testing::random_model(rng, n, i % 2 == 1);
    const auto env = testing::make_env(model, testing::uniform_int(rng, 4, kOracleMaxSteps));
    const auto ex = exhaustive_search(env);
    const double greedy = run_greedy(env).trajectory.final_fidelity;

    dppo::TrainConfig tc;
    tc.iterations = 40;
    tc.hidden_width = 32;
    tc.hidden_depth = 2;
    tc.learning_rate = 1e-3;
    tc.seed = i;
    tc.record_wall_time = false;
    const auto rl = dppo::train(tc, env);
    GrapeConfig gc;
    gc.restarts = kOracleGrapeRestarts;
    const auto grape = grape_optimize(env, gc, i);

    const std::string tag = "instance " + std::to_string(i);
    o.require(ex.fidelity >= greedy, tag + ": greedy " + fmt(greedy, 17) + " beats exhaustive");
    o.require(ex.fidelity >= rl.best_fidelity,
              tag + ": RL " + fmt(rl.best_fidelity, 17) + " beats exhaustive");
    o.require(grape.fidelity >= ex.fidelity - kRelaxationSlack,
              tag + ": GRAPE " + fmt(grape.fidelity, 17) + " < exhaustive " + fmt(ex.fidelity, 17));
    worst_relaxation = std::min(worst_relaxation, grape.fidelity - ex.fidelity);
    if (rl.best_fidelity == ex.fidelity) ++rl_hits;
  }
  o.detail << kOracleInstances << " instances (N <= " << kOracleMaxSteps
           << "); min GRAPE - exhaustive " << fmt(worst_relaxation, 3) << "; RL found the optimum on "
           << rl_hits;
}

void eigenenergy_variants(Outcome& o) {
  const auto s = run_config("eigenenergy_variants.json", "eigenenergy_variants");
  require_no_failures(o, s);
  const auto h = headline(s);
  std::set<std::string> sets;
  for (const auto& [task, row] : h) {
    const double g = get(row, "greedy", o, task);
    const double r = get(row, "rl", o, task);
    const double q = get(row, "grape", o, task);
    o.require(r >= g, task + ": RL " + fmt(r) + " < greedy " + fmt(g));
    o.require(q >= g, task + ": GRAPE " + fmt(q) + " < greedy " + fmt(g));
    o.detail << task << " " << fmt(g, 4) << "/" << fmt(r, 4) << "/" << fmt(q, 4) << "; ";
    for (const char* name : {"appendixD-uniform", "appendixD-degenerate"})
      if (row.begin()->second->task.env.model.energies == bench::named_energy_set(name, 4))
        sets.insert(name);
  }
  o.require(sets.size() == 2, "both energy sets must be covered");
  o.detail << "(greedy/RL/GRAPE)";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(Outcome& o) {
  setenv("QCTRL_DETERMINISTIC", "1", 1);
  bench::ExperimentConfig config;
  bench::TaskSpec task;
  task.id = "n3-dephasing";
  task.family = task.id;
  task.noise = "dephasing";
  task.sqrt_rate = 0.1;
  task.env = testing::make_env(LadderModel::regular(3, 0.5, 0.01), 24);
  config.tasks = {task};
  for (const char* m : {"rl", "grape", "greedy"}) {
    bench::MethodSpec spec;
    spec.name = m;
    spec.rl.train.iterations = 5;
    spec.rl.train.hidden_width = 32;
    spec.rl.train.hidden_depth = 2;
    spec.grape.grape.max_iterations = 30;
    config.methods.push_back(spec);
  }
  config.seeds = {11};
  config.max_workers = 4;

  std::vector<std::string> runs;
  for (int rep = 0; rep < 2; ++rep) {
    bench::RunOptions options;
    const auto dir = work_dir("determinism_" + std::to_string(rep));
    options.output_dir = dir.string();
    const auto s = bench::run_experiment(config, options);
    require_no_failures(o, s);
    bench::emit_plot_data(s.records, bench::PlotKind::kLearningCurve, dir.string());
    runs.push_back(slurp(dir / "records.json") + slurp(dir / "records.jsonl") +
                   slurp(dir / "learning_curve_n3-dephasing.csv"));
  }
  unsetenv("QCTRL_DETERMINISTIC");
  o.require(!runs[0].empty(), "empty output");
  o.require(runs[0] == runs[1], "outputs differ between repeats");
  o.detail << "records.json, records.jsonl and learning-curve CSV identical across two runs ("
           << runs[0].size() << " bytes)";
}

struct Criterion {
  int id;
  std::string title;
  std::function<void(Outcome&)> run;
  double max_seconds;  // 0: no runtime bound
};

}  // namespace
}  // namespace qctrl::acceptance

int main(int argc, char** argv) {
  using namespace qctrl::acceptance;
  const std::vector<Criterion> criteria{
      {1, "physics oracle suite", physics_oracles, kC1Seconds},
      {2, "analytic decay/dephasing", analytic_decay, 0},
      {3, "gradient suite", gradients, kC3Seconds},
      {4, "two-level reproduction", two_level_reproduction, kC4Seconds},
      {5, "multi-level closed systems", closed_grid, kC5Seconds},
      {6, "dissipative ordering", dissipative_ordering, 0},
      {7, "exhaustive-oracle equivalence", exhaustive_oracle, kC7Seconds},
      {8, "eigenenergy variants", eigenenergy_variants, 0},
      {9, "determinism", determinism, 0},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
    if (c.max_seconds > 0)
      o.require(secs <= c.max_seconds, "runtime " + fmt(secs, 4) + " s > " + fmt(c.max_seconds, 5));
    if (!o.pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.title
              << " -- " << o.detail.str() << o.violations << " (" << fmt(secs, 4) << " s)"
              << std::endl;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
