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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qctrl/baselines.hpp"
#include "qctrl/dppo.hpp"
#include "qctrl/env.hpp"
#include "qctrl/protocol.hpp"

namespace qctrl::bench {

/// Named eigenenergy sets accepted by `energy_set`.
std::vector<double> named_energy_set(const std::string& name, int n);

/// One physical task. Sweeps over noise rates expand into one TaskSpec per
/// rate, all sharing a `family` label.
struct TaskSpec {
  std::string id;
  std::string family;
  std::string noise = "none";  // none | dephasing | decay | mixed
  double sqrt_rate = 0.0;
  EnvConfig env;
};

nlohmann::json task_to_json(const TaskSpec& task);
/// Parses a single task object (no sweep keys).
TaskSpec task_from_json(const nlohmann::json& j);

struct RlSettings {
  dppo::TrainConfig train;
  bool checkpoint = false;
};

struct GreedySettings {
  GreedyMode mode = GreedyMode::kLookahead;
};

struct GrapeSettings {
  GrapeConfig grape;
  bool warm_start_greedy = false;
};

struct ExhaustiveSettings {
  int max_steps = kDefaultExhaustiveMaxSteps;
};

struct MethodSpec {
  std::string name;  // greedy | rl | grape | exhaustive
  RlSettings rl;
  GreedySettings greedy;
  GrapeSettings grape;
  ExhaustiveSettings exhaustive;
  /// Per-method seed list; empty means the experiment's seeds.
  std::vector<std::uint64_t> seeds;

  bool seeded() const { return name == "rl" || name == "grape"; }
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<TaskSpec> tasks;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string output_dir = "results";
  int max_workers = 1;
};

/// Validates against the schema and fills defaults (dt 0.5, target n,
/// initial 1). Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct ResultRecord {
  std::string method;
  std::string task_id;
  std::optional<std::uint64_t> seed;  // empty for unseeded methods and aggregates
  std::string kind = "cell";          // cell | best-of-seeds
  double best_fidelity = 0.0;
  Protocol protocol;
  std::int64_t episodes_or_iterations = 0;
  double wall_seconds = 0.0;
  std::string version;

  // Method-specific extras.
  double final_policy_fidelity = 0.0;  // rl: argmax rollout after training
  double median_fidelity = 0.0;        // best-of-seeds aggregates
  std::int64_t episodes_to_best = 0;   // rl
  std::vector<double> trajectory;      // replayed fidelity, steps + 1 entries
  std::vector<dppo::CurvePoint> learning_curve;
  TaskSpec task;
};

void to_json(nlohmann::json& j, const ResultRecord& r);
void from_json(const nlohmann::json& j, ResultRecord& r);

struct FailureRecord {
  std::string method;
  std::string task_id;
  std::optional<std::uint64_t> seed;
  std::string error;
};

struct RunOptions {
  std::string output_dir;  // empty: use the config's
  int max_workers = 0;     // 0: use the config's
  /// Called under the writer lock once per finished record.
  std::function<void(const ResultRecord&)> on_record;
};

struct RunSummary {
  std::vector<ResultRecord> records;
  std::vector<FailureRecord> failures;
};

/// Version stamp written into every record.
std::string version_stamp();

/// Runs one cell. Exposed so tests can exercise a method in isolation.
ResultRecord run_cell(const TaskSpec& task, const MethodSpec& method,
                      std::optional<std::uint64_t> seed, int threads);

/// Executes every (method, task, seed) cell. Records are appended to
/// records.jsonl as they finish; failures go to failures.jsonl and do not
/// stop the run. records.json (grid order) is written at the end.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::vector<ResultRecord> read_records(const std::string& dir);

enum class PlotKind { kFidelityVsRate, kFidelityVsTime, kLearningCurve };
PlotKind plot_kind_from_string(const std::string& s);
std::string to_string(PlotKind kind);

/// Writes one CSV per (kind, task or sweep family) plus <kind>.schema.json
/// describing the columns. Returns the CSV paths in write order.
std::vector<std::string> emit_plot_data(const std::vector<ResultRecord>& records, PlotKind kind,
                                        const std::string& out_dir);

}  // namespace qctrl::bench
