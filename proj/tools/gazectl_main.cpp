// Copyright 2026 The gazectl Authors.
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

// gazectl: validate robot models and scenarios, run gaze simulations.
//
//   gazectl run <scenario.json> --out <dir> [--dt s] [--duration s]
//               [--task-gain k] [--joint-limit-gain k] [--sigma-min s]
//   gazectl validate <model.json | scenario.json>
//   gazectl export-model <out.json>
//
// Diagnostics go to stderr; data goes to files only.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gazectl/gazectl.hpp"

namespace fs = std::filesystem;
using namespace gazectl;

namespace {

void report(const ValidationError& e) {
  std::cerr << "validation failed:\n";
  for (const auto& issue : e.issues()) std::cerr << "  " << issue << '\n';
}

struct RunOverrides {
  std::optional<double> dt, duration, task_gain, joint_limit_gain, sigma_min;
};

int cmd_run(const fs::path& scenario_path, const fs::path& out_dir,
            const RunOverrides& ov) {
  Json doc = detail::read_json_file(scenario_path);
  if (!doc.is_object()) throw ValidationError({"scenario: expected an object"});
  if (ov.dt) doc["dt"] = *ov.dt;
  if (ov.duration) doc["duration"] = *ov.duration;
  if (ov.task_gain) {
    // Overrides per-task gains too.
    doc["gains"]["task"] = *ov.task_gain;
    if (doc.contains("tasks") && doc["tasks"].is_array()) {
      for (Json& t : doc["tasks"]) {
        if (t.is_object()) t.erase("gain");
      }
    }
  }
  if (ov.joint_limit_gain) doc["gains"]["joint_limit"] = *ov.joint_limit_gain;
  if (ov.sigma_min) doc["gains"]["sigma_min"] = *ov.sigma_min;
  Scenario sc = scenario_from_json(doc, scenario_path.parent_path());

  const auto start = std::chrono::steady_clock::now();
  const SimLog log = run(sc);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();

  fs::create_directories(out_dir);
  const fs::path csv = out_dir / (sc.name + ".csv");
  const fs::path summary = out_dir / (sc.name + "_summary.json");
  {
    std::ofstream os(csv);
    if (!os) throw Error("cannot write " + csv.string());
    write_csv(os, log);
  }
  {
    std::ofstream os(summary);
    if (!os) throw Error("cannot write " + summary.string());
    os << summary_to_json(summarize(log, ms)).dump(2) << '\n';
  }
  std::cerr << sc.name << ": " << log.records.size() << " steps in " << ms
            << " ms -> " << csv.string() << '\n';
  return 0;
}

int cmd_validate(const fs::path& path) {
  const Json doc = detail::read_json_file(path);
  if (doc.is_object() && doc.contains("joints")) {
    const RobotModel m = model_from_json(doc);
    std::cerr << "model '" << m.name << "' ok: " << m.dof() << " joints, "
              << m.effectors.size() << " effectors\n";
    return 0;
  }
  if (doc.is_object() && doc.contains("tasks")) {
    const Scenario s = scenario_from_json(doc, path.parent_path());
    std::cerr << "scenario '" << s.name << "' ok: " << s.tasks.size()
              << " tasks, " << s.step_count() << " steps, model with "
              << s.model.dof() << " joints\n";
    return 0;
  }
  throw ValidationError(
      {path.string() + ": neither a model (joints) nor a scenario (tasks)"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prioritized head-eye gaze control simulator"};
  app.require_subcommand(1);
  int seed = 0;
  app.add_option("--seed", seed,
                 "Reserved; runs are deterministic and ignore it");

  fs::path run_scenario, run_out;
  RunOverrides ov;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its log");
  run_cmd->add_option("scenario", run_scenario, "Scenario file")->required();
  run_cmd->add_option("--out", run_out, "Output directory")->required();
  run_cmd->add_option("--dt", ov.dt, "Override the step size (s)");
  run_cmd->add_option("--duration", ov.duration, "Override the duration (s)");
  run_cmd->add_option("--task-gain", ov.task_gain, "Override every task gain");
  run_cmd->add_option("--joint-limit-gain", ov.joint_limit_gain,
                      "Override the joint limit task gain");
  run_cmd->add_option("--sigma-min", ov.sigma_min,
                      "Override the relative singular value cutoff");

  fs::path validate_path;
  auto* val_cmd = app.add_subcommand("validate", "Check a model or scenario file");
  val_cmd->add_option("path", validate_path, "Model or scenario file")->required();

  fs::path export_path;
  auto* exp_cmd = app.add_subcommand("export-model", "Write the built-in Dreamer model");
  exp_cmd->add_option("path", export_path, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run_scenario, run_out, ov);
    if (*val_cmd) return cmd_validate(validate_path);
    if (*exp_cmd) {
      std::ofstream os(export_path);
      if (!os) throw Error("cannot write " + export_path.string());
      os << model_to_json(dreamer_model()).dump(2) << '\n';
      return 0;
    }
  } catch (const ValidationError& e) {
    report(e);
    return 2;
  } catch (const FileNotFound& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
