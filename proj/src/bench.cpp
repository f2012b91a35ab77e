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

#include "qctrl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "qctrl/errors.hpp"
#include "qctrl/parallel.hpp"

#ifndef QCTRL_VERSION
#define QCTRL_VERSION "dev"
#endif

namespace qctrl::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kTaskKeys = {"id",     "n",      "gamma",  "N",
                                         "dt",     "energies", "energy_set",
                                         "dephasing_rate", "decay_rate", "target",
                                         "initial", "sqrt_dephasing_rates", "sqrt_decay_rates"};
const std::set<std::string> kTopKeys = {"name", "tasks", "methods", "seeds", "output_dir",
                                        "max_workers"};

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError(key, "config error at \"" + key + "\": " + msg);
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(key, e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return get_as<T>(j, key);
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key)) fail(key, "missing required key");
  if (!j.at(key).is_number()) fail(key, "expected a number");
  return j.at(key).get<double>();
}

int require_int(const json& j, const std::string& key) {
  if (!j.contains(key)) fail(key, "missing required key");
  if (!j.at(key).is_number_integer()) fail(key, "expected an integer");
  return j.at(key).get<int>();
}

std::string format_rate(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string noise_label(const LadderModel& m) {
  if (m.dephasing_rate > 0.0 && m.decay_rate > 0.0) return "mixed";
  if (m.dephasing_rate > 0.0) return "dephasing";
  if (m.decay_rate > 0.0) return "decay";
  return "none";
}

std::vector<TaskSpec> expand_task(const json& j, const std::string& fallback_id) {
  if (!j.is_object()) fail("tasks", "each task must be an object");
  for (const auto& [k, v] : j.items())
    if (!kTaskKeys.count(k)) fail(k, "unknown task key");
  json base = j;
  base.erase("sqrt_dephasing_rates");
  base.erase("sqrt_decay_rates");
  if (!base.contains("id")) base["id"] = fallback_id;

  std::vector<TaskSpec> out;
  const std::string id = base.at("id").get<std::string>();
  auto sweep = [&](const char* list_key, const char* rate_key, const char* noise) {
    if (!j.contains(list_key)) return;
    if (!j.at(list_key).is_array()) fail(list_key, "expected an array of numbers");
    for (const auto& v : j.at(list_key)) {
      if (!v.is_number()) fail(list_key, "expected an array of numbers");
      const double s = v.get<double>();
      if (s < 0.0) fail(list_key, "rates must be non-negative");
      json t = base;
      t["dephasing_rate"] = 0.0;
      t["decay_rate"] = 0.0;
      t[rate_key] = s * s;
      t["id"] = id + "/" + noise + "=" + format_rate(s);
      TaskSpec spec = task_from_json(t);
      spec.family = id + "-" + noise;
      spec.noise = noise;
      spec.sqrt_rate = s;
      out.push_back(std::move(spec));
    }
  };
  sweep("sqrt_dephasing_rates", "dephasing_rate", "dephasing");
  sweep("sqrt_decay_rates", "decay_rate", "decay");
  if (out.empty()) out.push_back(task_from_json(base));
  return out;
}

MethodSpec parse_method(const json& j) {
  MethodSpec m;
  json settings = json::object();
  if (j.is_string()) {
    m.name = j.get<std::string>();
  } else if (j.is_object() && j.contains("name") && j.at("name").is_string()) {
    m.name = j.at("name").get<std::string>();
    settings = j;
    settings.erase("name");
    if (settings.contains("seeds")) {
      m.seeds = get_as<std::vector<std::uint64_t>>(settings, "seeds");
      if (m.seeds.empty()) fail("seeds", "must list at least one seed");
      settings.erase("seeds");
    }
  } else {
    fail("methods", "each method must be a name or an object with \"name\"");
  }

  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : settings.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        fail(k, "unknown setting for method " + m.name);
    }
  };

  if (m.name == "greedy") {
    allow({"mode"});
    const auto mode = get_or<std::string>(settings, "mode", "lookahead");
    if (mode == "lookahead")
      m.greedy.mode = GreedyMode::kLookahead;
    else if (mode == "lyapunov")
      m.greedy.mode = GreedyMode::kLyapunov;
    else
      fail("mode", "expected lookahead or lyapunov");
  } else if (m.name == "rl") {
    allow({"iterations", "workers", "width", "depth", "learning_rate", "discount", "clip_eps",
           "epochs", "normalize_advantages", "head_scale", "checkpoint"});
    auto& t = m.rl.train;
    t.iterations = get_or(settings, "iterations", t.iterations);
    t.workers = get_or(settings, "workers", t.workers);
    t.hidden_width = get_or(settings, "width", t.hidden_width);
    t.hidden_depth = get_or(settings, "depth", t.hidden_depth);
    t.learning_rate = get_or(settings, "learning_rate", t.learning_rate);
    t.discount = get_or(settings, "discount", t.discount);
    t.clip_eps = get_or(settings, "clip_eps", t.clip_eps);
    t.update_epochs = get_or(settings, "epochs", t.update_epochs);
    t.normalize_advantages = get_or(settings, "normalize_advantages", t.normalize_advantages);
    t.head_scale = get_or(settings, "head_scale", t.head_scale);
    m.rl.checkpoint = get_or(settings, "checkpoint", false);
    try {
      t.validate();
    } catch (const DomainError& e) {
      fail("methods", e.what());
    }
  } else if (m.name == "grape") {
    allow({"max_iterations", "restarts", "step_size", "tol", "patience", "gradient",
           "warm_start_greedy"});
    auto& g = m.grape.grape;
    g.max_iterations = get_or(settings, "max_iterations", g.max_iterations);
    g.restarts = get_or(settings, "restarts", g.restarts);
    g.step_size = get_or(settings, "step_size", g.step_size);
    g.convergence_tol = get_or(settings, "tol", g.convergence_tol);
    g.patience = get_or(settings, "patience", g.patience);
    const auto grad = get_or<std::string>(settings, "gradient", "adjoint");
    if (grad == "adjoint")
      g.gradient_mode = GradientMode::kAdjoint;
    else if (grad == "finite_difference")
      g.gradient_mode = GradientMode::kFiniteDifference;
    else
      fail("gradient", "expected adjoint or finite_difference");
    m.grape.warm_start_greedy = get_or(settings, "warm_start_greedy", m.grape.warm_start_greedy);
    try {
      g.validate();
    } catch (const DomainError& e) {
      fail("methods", e.what());
    }
  } else if (m.name == "exhaustive") {
    allow({"max_N"});
    m.exhaustive.max_steps = get_or(settings, "max_N", m.exhaustive.max_steps);
  } else {
    fail("methods", "unknown method \"" + m.name + "\"");
  }
  if (!m.seeds.empty() && !m.seeded()) fail("seeds", "method " + m.name + " takes no seed");
  return m;
}

json curve_to_json(const std::vector<dppo::CurvePoint>& curve) {
  json a = json::array();
  for (const auto& p : curve)
    a.push_back({p.iteration, p.episodes, p.mean_fidelity, p.best_fidelity, p.wall_seconds});
  return a;
}

std::vector<dppo::CurvePoint> curve_from_json(const json& a) {
  std::vector<dppo::CurvePoint> out;
  for (const auto& row : a)
    out.push_back({row.at(0).get<int>(), row.at(1).get<std::int64_t>(), row.at(2).get<double>(),
                   row.at(3).get<double>(), row.at(4).get<double>()});
  return out;
}

json seed_to_json(const std::optional<std::uint64_t>& s) { return s ? json(*s) : json(nullptr); }

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

}  // namespace

std::vector<double> named_energy_set(const std::string& name, int n) {
  if (name == "regular") {
    std::vector<double> e(std::max(n, 0));
    for (int i = 0; i < n; ++i) e[i] = i + 1.0;
    return e;
  }
  if (name == "appendixD-uniform") return {0.40252154, 0.68846289, 0.8557115, 0.25471114};
  if (name == "appendixD-degenerate") return {1.0, 2.0, 2.0, 3.0};
  throw ConfigError("energy_set", "unknown energy set \"" + name + "\"");
}

json task_to_json(const TaskSpec& t) {
  const auto& m = t.env.model;
  return json{{"id", t.id},
              {"n", m.levels()},
              {"gamma", m.gamma_max},
              {"N", t.env.steps},
              {"dt", t.env.dt},
              {"energies", m.energies},
              {"dephasing_rate", m.dephasing_rate},
              {"decay_rate", m.decay_rate},
              {"target", t.env.target()},
              {"initial", t.env.initial()}};
}

TaskSpec task_from_json(const json& j) {
  if (!j.is_object()) fail("tasks", "task must be an object");
  for (const auto& [k, v] : j.items())
    if (!kTaskKeys.count(k)) fail(k, "unknown task key");
  TaskSpec t;
  t.id = get_or<std::string>(j, "id", "task");
  const int n = require_int(j, "n");
  if (n < 2) fail("n", "need at least 2 levels");
  auto& m = t.env.model;
  m.gamma_max = require_number(j, "gamma");
  t.env.steps = require_int(j, "N");
  if (t.env.steps < 1) fail("N", "must be >= 1");
  t.env.dt = j.contains("dt") ? require_number(j, "dt") : 0.5;
  if (j.contains("energies") && j.contains("energy_set"))
    fail("energies", "give either energies or energy_set, not both");
  if (j.contains("energies")) {
    m.energies = get_as<std::vector<double>>(j, "energies");
  } else {
    m.energies = named_energy_set(get_or<std::string>(j, "energy_set", "regular"), n);
  }
  if (static_cast<int>(m.energies.size()) != n)
    fail(j.contains("energies") ? "energies" : "energy_set", "length differs from n");
  m.dephasing_rate = j.contains("dephasing_rate") ? require_number(j, "dephasing_rate") : 0.0;
  m.decay_rate = j.contains("decay_rate") ? require_number(j, "decay_rate") : 0.0;
  t.env.target_level = j.contains("target") ? require_int(j, "target") : n;
  t.env.initial_level = j.contains("initial") ? require_int(j, "initial") : 1;
  try {
    t.env.validate();
  } catch (const std::exception& e) {
    fail("tasks", e.what());
  }
  t.family = t.id;
  t.noise = noise_label(m);
  const double rate = std::max(m.dephasing_rate, m.decay_rate);
  t.sqrt_rate = std::sqrt(rate);
  return t;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("<root>", "config must be a JSON object");
  const bool single_task = j.contains("n") || j.contains("N") || j.contains("gamma");
  for (const auto& [k, v] : j.items()) {
    const bool ok = kTopKeys.count(k) || (single_task && kTaskKeys.count(k));
    if (!ok) fail(k, "unknown key");
  }
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.max_workers = get_or(j, "max_workers", c.max_workers);
  if (j.contains("seeds")) {
    c.seeds = get_as<std::vector<std::uint64_t>>(j, "seeds");
    if (c.seeds.empty()) fail("seeds", "must list at least one seed");
  }

  if (single_task) {
    if (j.contains("tasks")) fail("tasks", "give either top-level task keys or a tasks list");
    json t = json::object();
    for (const auto& [k, v] : j.items())
      if (kTaskKeys.count(k)) t[k] = v;
    c.tasks = expand_task(t, c.name);
  } else {
    if (!j.contains("tasks")) fail("tasks", "missing required key");
    if (!j.at("tasks").is_array()) fail("tasks", "expected an array");
    int index = 0;
    for (const auto& t : j.at("tasks")) {
      auto expanded = expand_task(t, "task" + std::to_string(index++));
      c.tasks.insert(c.tasks.end(), expanded.begin(), expanded.end());
    }
  }
  std::set<std::string> ids;
  for (const auto& t : c.tasks)
    if (!ids.insert(t.id).second) fail("id", "duplicate task id \"" + t.id + "\"");

  if (!j.contains("methods")) fail("methods", "missing required key");
  if (!j.at("methods").is_array()) fail("methods", "expected an array");
  for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

std::string version_stamp() { return std::string("qctrl ") + QCTRL_VERSION; }

void to_json(json& j, const ResultRecord& r) {
  j = json{{"method", r.method},
           {"task_id", r.task_id},
           {"seed", seed_to_json(r.seed)},
           {"kind", r.kind},
           {"best_fidelity", r.best_fidelity},
           {"protocol", r.protocol},
           {"episodes_or_iterations", r.episodes_or_iterations},
           {"wall_seconds", r.wall_seconds},
           {"version", r.version},
           {"final_policy_fidelity", r.final_policy_fidelity},
           {"median_fidelity", r.median_fidelity},
           {"episodes_to_best", r.episodes_to_best},
           {"trajectory", r.trajectory},
           {"learning_curve", curve_to_json(r.learning_curve)},
           {"family", r.task.family},
           {"noise", r.task.noise},
           {"sqrt_rate", r.task.sqrt_rate},
           {"task", task_to_json(r.task)}};
}

void from_json(const json& j, ResultRecord& r) {
  r.method = j.at("method").get<std::string>();
  r.task_id = j.at("task_id").get<std::string>();
  r.seed = j.at("seed").is_null() ? std::nullopt
                                  : std::optional<std::uint64_t>(j.at("seed").get<std::uint64_t>());
  r.kind = j.value("kind", "cell");
  r.best_fidelity = j.at("best_fidelity").get<double>();
  r.protocol = j.at("protocol").get<Protocol>();
  r.episodes_or_iterations = j.at("episodes_or_iterations").get<std::int64_t>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.version = j.at("version").get<std::string>();
  r.final_policy_fidelity = j.value("final_policy_fidelity", 0.0);
  r.median_fidelity = j.value("median_fidelity", 0.0);
  r.episodes_to_best = j.value("episodes_to_best", std::int64_t{0});
  r.trajectory = j.value("trajectory", std::vector<double>{});
  r.learning_curve = curve_from_json(j.value("learning_curve", json::array()));
  r.task = task_from_json(j.at("task"));
  r.task.family = j.value("family", r.task.family);
  r.task.noise = j.value("noise", r.task.noise);
  r.task.sqrt_rate = j.value("sqrt_rate", r.task.sqrt_rate);
}

namespace {

ResultRecord run_cell_impl(const TaskSpec& task, const MethodSpec& method,
                           std::optional<std::uint64_t> seed, int threads,
                           dppo::ActorCriticParams* trained) {
  const bool timed = !deterministic_mode();
  const auto start = std::chrono::steady_clock::now();
  ResultRecord r;
  r.method = method.name;
  r.task_id = task.id;
  r.seed = method.seeded() ? seed : std::nullopt;
  r.version = version_stamp();
  r.task = task;
  const auto& env = task.env;

  if (method.name == "greedy") {
    auto g = run_greedy(env, method.greedy.mode);
    r.protocol = std::move(g.protocol);
    r.episodes_or_iterations = env.steps;
  } else if (method.name == "exhaustive") {
    auto s = exhaustive_search(env, method.exhaustive.max_steps);
    r.protocol = std::move(s.protocol);
    r.episodes_or_iterations = std::int64_t{1} << env.steps;
  } else if (method.name == "grape") {
    auto cfg = method.grape.grape;
    cfg.max_threads = threads;
    std::vector<Protocol> warm;
    if (method.grape.warm_start_greedy) {
      auto g = run_greedy(env).protocol;
      g.mode = ProtocolMode::kContinuous;
      warm.push_back(std::move(g));
    }
    auto res = grape_optimize(env, cfg, seed.value_or(0), warm);
    r.protocol = std::move(res.protocol);
    r.episodes_or_iterations = res.iterations;
  } else if (method.name == "rl") {
    auto cfg = method.rl.train;
    cfg.seed = seed.value_or(0);
    cfg.max_threads = threads;
    cfg.record_wall_time = timed;
    auto res = dppo::train(cfg, env);
    r.protocol = std::move(res.best_protocol);
    r.episodes_or_iterations = res.episodes;
    r.episodes_to_best = res.episodes_to_best;
    r.final_policy_fidelity = res.final_fidelity;
    r.learning_curve = std::move(res.curve);
    if (trained) *trained = std::move(res.params);
  } else {
    throw ConfigError("methods", "unknown method \"" + method.name + "\"");
  }

  // Scores come from replaying the stored protocol, so a record always
  // reproduces its own fidelity.
  const auto replay = run_protocol(env, r.protocol);
  r.trajectory = replay.fidelity;
  r.best_fidelity = replay.final_fidelity;
  if (timed)
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

ResultRecord run_cell(const TaskSpec& task, const MethodSpec& method,
                      std::optional<std::uint64_t> seed, int threads) {
  return run_cell_impl(task, method, seed, threads, nullptr);
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const std::string out_dir = options.output_dir.empty() ? config.output_dir : options.output_dir;
  fs::create_directories(out_dir);
  const int max_workers = resolve_threads(options.max_workers > 0 ? options.max_workers
                                                                  : config.max_workers);

  struct Cell {
    std::size_t task;
    std::size_t method;
    std::optional<std::uint64_t> seed;
  };
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < config.tasks.size(); ++t) {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      if (config.methods[m].seeded()) {
        const auto& method = config.methods[m];
        for (auto s : method.seeds.empty() ? config.seeds : method.seeds)
          cells.push_back({t, m, s});
      } else {
        cells.push_back({t, m, std::nullopt});
      }
    }
  }

  std::ofstream records_log(fs::path(out_dir) / "records.jsonl", std::ios::trunc);
  std::ofstream failures_log(fs::path(out_dir) / "failures.jsonl", std::ios::trunc);
  std::mutex writer;
  std::vector<std::optional<ResultRecord>> results(cells.size());
  std::vector<std::optional<FailureRecord>> failures(cells.size());
  const int inner_threads = max_workers > 1 ? 1 : resolve_threads(0);

  parallel_for(static_cast<int>(cells.size()), max_workers, [&](int i) {
    const auto& cell = cells[i];
    const auto& task = config.tasks[cell.task];
    const auto& method = config.methods[cell.method];
    try {
      const bool save = method.name == "rl" && method.rl.checkpoint;
      dppo::ActorCriticParams params;
      auto rec = run_cell_impl(task, method, cell.seed, inner_threads, save ? &params : nullptr);
      if (save) {
        const auto dir = fs::path(out_dir) / "checkpoints";
        fs::create_directories(dir);
        const auto s = cell.seed.value_or(0);
        dppo::save_checkpoint(
            (dir / (file_safe(task.id) + "_seed" + std::to_string(s) + ".ckpt")).string(), params,
            {s, method.rl.train.iterations});
      }
      std::lock_guard lock(writer);
      records_log << json(rec).dump() << '\n' << std::flush;
      if (options.on_record) options.on_record(rec);
      results[i] = std::move(rec);
    } catch (const std::exception& e) {
      std::lock_guard lock(writer);
      FailureRecord f{method.name, task.id, method.seeded() ? cell.seed : std::nullopt, e.what()};
      failures_log << json{{"method", f.method},
                           {"task_id", f.task_id},
                           {"seed", seed_to_json(f.seed)},
                           {"error", f.error}}
                          .dump()
                   << '\n'
                   << std::flush;
      failures[i] = std::move(f);
    }
  });

  RunSummary summary;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (results[i]) summary.records.push_back(*results[i]);
    if (failures[i]) summary.failures.push_back(*failures[i]);

    // Close each (task, rl) block with a best-of-seeds aggregate.
    const bool last_of_block = i + 1 == cells.size() || cells[i + 1].task != cells[i].task ||
                               cells[i + 1].method != cells[i].method;
    const auto& method = config.methods[cells[i].method];
    if (!(last_of_block && method.name == "rl")) continue;
    std::vector<const ResultRecord*> block;
    for (std::size_t k = 0; k <= i; ++k)
      if (results[k] && cells[k].task == cells[i].task && cells[k].method == cells[i].method)
        block.push_back(&*results[k]);
    if (block.empty()) continue;
    const ResultRecord* best = block.front();
    std::vector<double> values;
    for (const auto* r : block) {
      values.push_back(r->best_fidelity);
      if (r->best_fidelity > best->best_fidelity) best = r;
    }
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    const double median =
        values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    ResultRecord agg = *best;
    agg.kind = "best-of-seeds";
    agg.median_fidelity = median;
    agg.learning_curve.clear();
    records_log << json(agg).dump() << '\n' << std::flush;
    if (options.on_record) options.on_record(agg);
    summary.records.push_back(std::move(agg));
  }

  std::ofstream all(fs::path(out_dir) / "records.json", std::ios::trunc);
  all << json(summary.records).dump(1) << '\n';
  return summary;
}

std::vector<ResultRecord> read_records(const std::string& dir) {
  const auto full = fs::path(dir) / "records.json";
  std::vector<ResultRecord> out;
  if (fs::exists(full)) {
    std::ifstream in(full);
    out = json::parse(in).get<std::vector<ResultRecord>>();
    return out;
  }
  const auto lines = fs::path(dir) / "records.jsonl";
  std::ifstream in(lines);
  if (!in) throw std::runtime_error("no records found in " + dir);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line).get<ResultRecord>());
  return out;
}

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "fidelity_vs_rate") return PlotKind::kFidelityVsRate;
  if (s == "fidelity_vs_time") return PlotKind::kFidelityVsTime;
  if (s == "learning_curve") return PlotKind::kLearningCurve;
  throw DomainError("unknown plot kind \"" + s + "\"");
}

std::string to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::kFidelityVsRate:
      return "fidelity_vs_rate";
    case PlotKind::kFidelityVsTime:
      return "fidelity_vs_time";
    case PlotKind::kLearningCurve:
      return "learning_curve";
  }
  return "unknown";
}

namespace {

struct CsvSchema {
  std::vector<std::pair<std::string, std::string>> columns;
};

CsvSchema schema_for(PlotKind kind) {
  switch (kind) {
    case PlotKind::kFidelityVsRate:
      return {{{"method", "optimizer name"},
               {"n", "number of levels"},
               {"noise", "dephasing or decay"},
               {"sqrt_rate", "square root of the noise rate"},
               {"best_fidelity", "best terminal fidelity over seeds"}}};
    case PlotKind::kFidelityVsTime:
      return {{{"method", "optimizer name"},
               {"step", "slice index, 0 is the initial state"},
               {"time", "step * dt"},
               {"fidelity", "target population after `step` slices"}}};
    case PlotKind::kLearningCurve:
      return {{{"method", "optimizer name"},
               {"seed", "training seed"},
               {"iteration", "outer iteration"},
               {"episodes_so_far", "episodes collected so far"},
               {"mean_fidelity", "mean terminal fidelity of this iteration's episodes"},
               {"best_fidelity", "best terminal fidelity seen so far"},
               {"wall_seconds", "elapsed time, 0 in deterministic mode"}}};
  }
  return {};
}

std::string header_line(const CsvSchema& s) {
  std::string h;
  for (std::size_t i = 0; i < s.columns.size(); ++i) h += (i ? "," : "") + s.columns[i].first;
  return h + "\n";
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Best cell record per (task, method), skipping aggregates.
std::map<std::string, std::map<std::string, const ResultRecord*>> best_by_task(
    const std::vector<ResultRecord>& records) {
  std::map<std::string, std::map<std::string, const ResultRecord*>> out;
  for (const auto& r : records) {
    if (r.kind != "cell") continue;
    auto& slot = out[r.task_id][r.method];
    if (!slot || r.best_fidelity > slot->best_fidelity) slot = &r;
  }
  return out;
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::vector<ResultRecord>& records, PlotKind kind,
                                        const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto schema = schema_for(kind);
  const std::string kind_name = to_string(kind);
  {
    json cols = json::array();
    for (const auto& [name, desc] : schema.columns) cols.push_back({{"name", name}, {"description", desc}});
    std::ofstream s(fs::path(out_dir) / (kind_name + ".schema.json"));
    s << json{{"kind", kind_name}, {"format", "csv, comma separated, LF line endings, header row"},
              {"columns", cols}}
             .dump(1)
      << '\n';
  }

  // file name -> rows, sorted by key for a deterministic layout.
  std::map<std::string, std::vector<std::string>> files;
  const auto best = best_by_task(records);

  if (kind == PlotKind::kFidelityVsRate) {
    std::map<std::string, std::map<std::tuple<std::string, double, std::string>, std::string>> rows;
    for (const auto& [task_id, methods] : best) {
      for (const auto& [method, r] : methods) {
        if (r->task.noise == "none") continue;
        rows[r->task.family][{method, r->task.sqrt_rate, task_id}] =
            method + "," + std::to_string(r->task.env.model.levels()) + "," + r->task.noise + "," +
            num(r->task.sqrt_rate) + "," + num(r->best_fidelity) + "\n";
      }
    }
    for (auto& [family, sorted] : rows) {
      auto& f = files[kind_name + "_" + file_safe(family) + ".csv"];
      for (auto& [key, line] : sorted) f.push_back(line);
    }
  } else if (kind == PlotKind::kFidelityVsTime) {
    for (const auto& [task_id, methods] : best) {
      auto& f = files[kind_name + "_" + file_safe(task_id) + ".csv"];
      for (const auto& [method, r] : methods) {
        for (std::size_t k = 0; k < r->trajectory.size(); ++k)
          f.push_back(method + "," + std::to_string(k) + "," +
                      num(static_cast<double>(k) * r->task.env.dt) + "," + num(r->trajectory[k]) +
                      "\n");
      }
    }
  } else {
    std::map<std::string, std::map<std::pair<std::string, std::uint64_t>, const ResultRecord*>> by;
    for (const auto& r : records)
      if (r.kind == "cell" && !r.learning_curve.empty())
        by[r.task_id][{r.method, r.seed.value_or(0)}] = &r;
    for (const auto& [task_id, runs] : by) {
      auto& f = files[kind_name + "_" + file_safe(task_id) + ".csv"];
      for (const auto& [key, r] : runs)
        for (const auto& p : r->learning_curve)
          f.push_back(key.first + "," + std::to_string(key.second) + "," +
                      std::to_string(p.iteration) + "," + std::to_string(p.episodes) + "," +
                      num(p.mean_fidelity) + "," + num(p.best_fidelity) + "," +
                      num(p.wall_seconds) + "\n");
    }
  }
  if (files.empty()) files[kind_name + ".csv"] = {};

  std::vector<std::string> written;
  for (const auto& [name, lines] : files) {
    const auto path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << header_line(schema);
    for (const auto& l : lines) out << l;
    written.push_back(path);
  }
  return written;
}

}  // namespace qctrl::bench
