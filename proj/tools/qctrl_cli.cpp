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

// Command-line driver: run experiment grids, replay stored protocols and
// export plot data.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qctrl/bench.hpp"
#include "qctrl/errors.hpp"

namespace {

using nlohmann::json;
using namespace qctrl;

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, int max_workers) {
  auto config = bench::load_config(path);
  if (seed) {
    config.seeds = {*seed};
    for (auto& m : config.methods) m.seeds.clear();
  }
  bench::RunOptions opts;
  opts.output_dir = out_dir;
  opts.max_workers = max_workers;
  opts.on_record = [](const bench::ResultRecord& r) {
    std::cerr << r.task_id << "  " << r.method;
    if (r.seed) std::cerr << "  seed=" << *r.seed;
    if (r.kind != "cell") std::cerr << "  [" << r.kind << "]";
    std::cerr << "  F=" << r.best_fidelity << '\n';
  };
  const auto summary = bench::run_experiment(config, opts);
  std::cout << summary.records.size() << " records, " << summary.failures.size()
            << " failures -> " << (out_dir.empty() ? config.output_dir : out_dir) << '\n';
  return summary.failures.empty() ? 0 : 3;
}

// Accepts a result record, or {"task": {...}, "protocol": {...}}.
int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  const json j = json::parse(in);
  const auto task = bench::task_from_json(j.at("task"));
  const auto protocol = j.at("protocol").get<Protocol>();
  protocol.validate(task.env.model.gamma_max);
  if (static_cast<int>(protocol.amplitudes.size()) != task.env.steps)
    throw ProtocolViolation("protocol length differs from N");
  const auto traj = run_protocol(task.env, protocol);
  std::cout << json{{"task_id", task.id},
                    {"final_fidelity", traj.final_fidelity},
                    {"trajectory", traj.fidelity}}
                   .dump(1)
            << '\n';
  return 0;
}

int cmd_plotdata(const std::string& dir, const std::string& kind, const std::string& out_dir) {
  const auto k = bench::plot_kind_from_string(kind);
  const auto records = bench::read_records(dir);
  for (const auto& p : bench::emit_plot_data(records, k, out_dir.empty() ? dir : out_dir))
    std::cout << p << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bang-bang quantum control benchmarks"};
  app.set_version_flag("--version", bench::version_stamp());
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int max_workers = 0;
  app.add_option("--seed", seed, "Run only this seed for seeded methods");
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--max-workers", max_workers, "Concurrent grid cells (0: config value)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path, protocol_path, records_dir, kind;
  auto* run = app.add_subcommand("run", "Run every cell of an experiment config");
  run->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  auto* replay = app.add_subcommand("replay", "Replay a protocol and print its fidelity trajectory");
  replay->add_option("protocol", protocol_path)->required()->check(CLI::ExistingFile);
  auto* plot = app.add_subcommand("plotdata", "Write plot-ready CSVs from a records directory");
  plot->add_option("records-dir", records_dir)->required()->check(CLI::ExistingDirectory);
  plot->add_option("--kind", kind, "fidelity_vs_rate | fidelity_vs_time | learning_curve")
      ->required();

  // Global options are accepted on either side of the subcommand.
  for (auto* sub : {run, replay, plot}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, out_dir, max_workers);
    if (*replay) return cmd_replay(protocol_path);
    if (*plot) return cmd_plotdata(records_dir, kind, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
