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

// Model and scenario files (JSON), simulation logs (CSV) and run summaries.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gazectl/kinematics.hpp"
#include "gazectl/simulator.hpp"

namespace gazectl {

using Json = nlohmann::json;

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::filesystem::path& p)
      : Error("file not found: " + p.string()) {}
};

namespace detail {

// Collects schema issues with their field paths instead of stopping at the
// first one, so `validate` can report everything at once.
class JsonReader {
 public:
  std::vector<std::string> issues;

  const Json* field(const Json& obj, const std::string& key,
                    const std::string& path, bool required = true) {
    if (!obj.is_object()) {
      issues.push_back(path + ": expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issues.push_back(join(path, key) + ": missing field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const Json& obj, const std::string& key,
                               const std::string& path, bool required = true) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      issues.push_back(join(path, key) + ": expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::string> string(const Json& obj, const std::string& key,
                                    const std::string& path, bool required = true) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      issues.push_back(join(path, key) + ": expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const Json& v, const std::string& path,
                                             std::optional<std::size_t> len = {}) {
    if (!v.is_array()) {
      issues.push_back(path + ": expected an array");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        issues.push_back(path + "[" + std::to_string(i) + "]: expected a number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    if (len && out.size() != *len) {
      issues.push_back(path + ": expected " + std::to_string(*len) + " entries");
      return std::nullopt;
    }
    return out;
  }

  std::optional<Vec3> vec3(const Json& v, const std::string& path) {
    auto xs = numbers(v, path, 3);
    if (!xs) return std::nullopt;
    return Vec3((*xs)[0], (*xs)[1], (*xs)[2]);
  }

  std::optional<Vec3> vec3(const Json& obj, const std::string& key,
                           const std::string& path, bool required = true) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    return vec3(*v, join(path, key));
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

inline Json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FileNotFound(p);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError({p.string() + ": malformed JSON (" + e.what() + ")"});
  }
}

inline int row_index(const Json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "roll" || s == "x") return 0;
    if (s == "pitch" || s == "y") return 1;
    if (s == "yaw" || s == "z") return 2;
  }
  return -1;
}

}  // namespace detail

/// Builds a model from its JSON form. Schema problems and invariant
/// violations are both reported through ValidationError.
inline RobotModel model_from_json(const Json& doc) {
  detail::JsonReader rd;
  RobotModel m;
  if (!doc.is_object()) throw ValidationError({"model: expected an object"});
  m.name = rd.string(doc, "name", "", false).value_or("model");
  if (const Json* joints = rd.field(doc, "joints", "")) {
    if (!joints->is_array()) {
      rd.issues.push_back("joints: expected an array");
    } else {
      for (std::size_t i = 0; i < joints->size(); ++i) {
        const Json& jj = (*joints)[i];
        const std::string path = "joints[" + std::to_string(i) + "]";
        JointDef j;
        j.name = rd.string(jj, "name", path).value_or("");
        j.axis.omega = rd.vec3(jj, "omega", path).value_or(Vec3::UnitZ());
        j.axis.v = rd.vec3(jj, "v", path).value_or(Vec3::Zero());
        j.q_min = rd.number(jj, "q_min", path).value_or(j.q_min);
        j.q_max = rd.number(jj, "q_max", path).value_or(j.q_max);
        j.buffer = rd.number(jj, "buffer", path).value_or(j.buffer);
        j.parent = static_cast<int>(
            rd.number(jj, "parent", path, false).value_or(static_cast<double>(i) - 1));
        m.joints.push_back(std::move(j));
      }
    }
  }
  if (const Json* effs = rd.field(doc, "effectors", "")) {
    if (!effs->is_array()) {
      rd.issues.push_back("effectors: expected an array");
    } else {
      for (std::size_t e = 0; e < effs->size(); ++e) {
        const Json& ej = (*effs)[e];
        const std::string path = "effectors[" + std::to_string(e) + "]";
        EffectorDef eff;
        eff.name = rd.string(ej, "name", path).value_or("");
        if (const Json* js = rd.field(ej, "joints", path)) {
          if (auto xs = rd.numbers(*js, path + ".joints")) {
            for (double x : *xs) eff.contributing_joints.push_back(static_cast<int>(x));
          }
        }
        if (const Json* rows = rd.field(ej, "rows", path)) {
          if (!rows->is_array()) {
            rd.issues.push_back(path + ".rows: expected an array");
          } else {
            for (const Json& r : *rows) {
              const int idx = detail::row_index(r);
              if (idx < 0) rd.issues.push_back(path + ".rows: unknown row " + r.dump());
              eff.rows.push_back(idx);
            }
          }
        }
        if (const Json* hp = rd.field(ej, "home_pose", path, false)) {
          eff.home_pose.translation =
              rd.vec3(*hp, "translation", path + ".home_pose").value_or(Vec3::Zero());
          if (const Json* rot = rd.field(*hp, "rotation", path + ".home_pose", false)) {
            if (!rot->is_array() || rot->size() != 3) {
              rd.issues.push_back(path + ".home_pose.rotation: expected 3 rows");
            } else {
              for (int r = 0; r < 3; ++r) {
                if (auto row = rd.vec3((*rot)[r], path + ".home_pose.rotation[" +
                                                      std::to_string(r) + "]")) {
                  eff.home_pose.rotation.row(r) = row->transpose();
                }
              }
            }
          }
        }
        m.effectors.push_back(std::move(eff));
      }
    }
  }
  if (rd.issues.empty()) {
    for (auto& s : validate(m)) rd.issues.push_back(std::move(s));
  }
  if (!rd.issues.empty()) throw ValidationError(std::move(rd.issues));
  return m;
}

inline Json model_to_json(const RobotModel& m) {
  static const char* kRowNames[] = {"roll", "pitch", "yaw"};
  auto vec = [](const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); };
  Json doc;
  doc["name"] = m.name;
  doc["joints"] = Json::array();
  for (const JointDef& j : m.joints) {
    doc["joints"].push_back({{"name", j.name},
                             {"omega", vec(j.axis.omega)},
                             {"v", vec(j.axis.v)},
                             {"q_min", j.q_min},
                             {"q_max", j.q_max},
                             {"buffer", j.buffer},
                             {"parent", j.parent}});
  }
  doc["effectors"] = Json::array();
  for (const EffectorDef& e : m.effectors) {
    Json rows = Json::array();
    for (int r : e.rows) rows.push_back(kRowNames[r]);
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(vec(e.home_pose.rotation.row(r).transpose()));
    doc["effectors"].push_back(
        {{"name", e.name},
         {"joints", e.contributing_joints},
         {"rows", rows},
         {"home_pose", {{"translation", vec(e.home_pose.translation)}, {"rotation", rot}}}});
  }
  return doc;
}

inline RobotModel load_model(const std::filesystem::path& p) {
  return model_from_json(detail::read_json_file(p));
}

/// Builds a scenario; `base_dir` resolves a relative model_path.
inline Scenario scenario_from_json(const Json& doc,
                                   const std::filesystem::path& base_dir = {}) {
  detail::JsonReader rd;
  Scenario s;
  if (!doc.is_object()) throw ValidationError({"scenario: expected an object"});
  s.name = rd.string(doc, "name", "", false).value_or("scenario");

  if (auto mp = rd.string(doc, "model_path", "")) {
    const std::filesystem::path path =
        std::filesystem::path(*mp).is_absolute() ? std::filesystem::path(*mp)
                                                 : base_dir / *mp;
    try {
      s.model = load_model(path);
    } catch (const FileNotFound& e) {
      rd.issues.push_back(std::string("model_path: ") + e.what());
    } catch (const ValidationError& e) {
      for (const auto& i : e.issues()) rd.issues.push_back("model." + i);
    }
  }
  s.dt = rd.number(doc, "dt", "").value_or(s.dt);
  s.duration = rd.number(doc, "duration", "").value_or(s.duration);
  if (const Json* q0 = rd.field(doc, "initial_q", "", false)) {
    if (auto xs = rd.numbers(*q0, "initial_q")) {
      s.initial_q = Eigen::Map<const VecX>(xs->data(), static_cast<Eigen::Index>(xs->size()));
    }
  }
  if (auto mode = rd.string(doc, "limit_mode", "", false)) {
    if (*mode == "idv") {
      s.solver.limit_mode = LimitMode::kIdv;
    } else if (*mode == "hard") {
      s.solver.limit_mode = LimitMode::kHard;
    } else if (*mode == "none") {
      s.solver.limit_mode = LimitMode::kDisabled;
    } else {
      rd.issues.push_back("limit_mode: expected idv, hard or none");
    }
  }
  double default_gain = 1.0;
  if (const Json* g = rd.field(doc, "gains", "", false)) {
    default_gain = rd.number(*g, "task", "gains", false).value_or(default_gain);
    s.solver.joint_limit_gain =
        rd.number(*g, "joint_limit", "gains", false).value_or(s.solver.joint_limit_gain);
    s.solver.sigma_rel = rd.number(*g, "sigma_min", "gains", false).value_or(s.solver.sigma_rel);
  }

  if (const Json* tasks = rd.field(doc, "tasks", "")) {
    if (!tasks->is_array()) {
      rd.issues.push_back("tasks: expected an array");
    } else {
      for (std::size_t i = 0; i < tasks->size(); ++i) {
        const Json& tj = (*tasks)[i];
        const std::string path = "tasks[" + std::to_string(i) + "]";
        GazeTaskSpec t;
        t.effector = rd.string(tj, "effector", path).value_or("");
        t.priority = static_cast<int>(rd.number(tj, "priority", path).value_or(0));
        t.gain = rd.number(tj, "gain", path, false).value_or(default_gain);
        if (const Json* fv = rd.field(tj, "fixed_vector", path, false)) {
          if (fv->is_string() && fv->get<std::string>() == "current") {
            t.fixed_vector_from_current = true;
          } else {
            t.fixed_vector = rd.vec3(*fv, path + ".fixed_vector").value_or(Vec3::UnitZ());
          }
        }
        if (const Json* fx = rd.field(tj, "fixation", path)) {
          const std::string fpath = path + ".fixation";
          if (fx->is_object() && fx->contains("point")) {
            t.fixation = rd.vec3(*fx, "point", fpath).value_or(Vec3::UnitX());
          } else if (fx->is_object() && fx->contains("waypoints")) {
            WaypointPath wp;
            const Json& pts = (*fx)["waypoints"];
            if (!pts.is_array()) {
              rd.issues.push_back(fpath + ".waypoints: expected an array");
            } else {
              for (std::size_t k = 0; k < pts.size(); ++k) {
                if (auto p = rd.vec3(pts[k], fpath + ".waypoints[" + std::to_string(k) + "]")) {
                  wp.waypoints.push_back(*p);
                }
              }
            }
            if (const Json* d = rd.field(*fx, "durations", fpath)) {
              wp.durations = rd.numbers(*d, fpath + ".durations").value_or(std::vector<double>{});
            }
            if (const Json* d = rd.field(*fx, "dwell", fpath, false)) {
              wp.dwell = rd.numbers(*d, fpath + ".dwell").value_or(std::vector<double>{});
            }
            auto path_issues = wp.validate();
            for (auto& pi : path_issues) rd.issues.push_back(fpath + "." + pi);
            if (path_issues.empty()) t.fixation = FixationTrajectory(std::move(wp));
          } else {
            rd.issues.push_back(fpath + ": expected {point: ...} or {waypoints: ...}");
          }
        }
        s.tasks.push_back(std::move(t));
      }
    }
  }

  if (const Json* ps = rd.field(doc, "perturbation", "", false)) {
    if (!ps->is_array()) {
      rd.issues.push_back("perturbation: expected an array");
    } else {
      for (std::size_t i = 0; i < ps->size(); ++i) {
        const Json& pj = (*ps)[i];
        const std::string path = "perturbation[" + std::to_string(i) + "]";
        Perturbation p;
        if (const Json* j = rd.field(pj, "joint", path)) {
          if (j->is_number_integer()) {
            p.joint = j->get<int>();
          } else if (j->is_string()) {
            p.joint = s.model.joint_index(j->get<std::string>());
            if (p.joint < 0) rd.issues.push_back(path + ".joint: unknown joint " + j->dump());
          } else {
            rd.issues.push_back(path + ".joint: expected an index or a name");
          }
        }
        if (pj.contains("times")) {
          p.times = rd.numbers(pj["times"], path + ".times").value_or(std::vector<double>{});
          if (const Json* v = rd.field(pj, "values", path)) {
            p.values = rd.numbers(*v, path + ".values").value_or(std::vector<double>{});
          }
          if (p.times.empty()) rd.issues.push_back(path + ".times: must not be empty");
        } else {
          p.amplitude = rd.number(pj, "amplitude", path).value_or(0.0);
          p.frequency = rd.number(pj, "frequency", path).value_or(0.0);
          p.phase = rd.number(pj, "phase", path, false).value_or(0.0);
        }
        s.perturbations.push_back(std::move(p));
      }
    }
  }

  if (rd.issues.empty()) {
    for (auto& i : validate(s)) rd.issues.push_back(std::move(i));
  }
  if (!rd.issues.empty()) throw ValidationError(std::move(rd.issues));
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& p) {
  return scenario_from_json(detail::read_json_file(p), p.parent_path());
}

/// Comma-separated log with a header row; values printed with 17
/// significant digits so identical runs give identical files.
inline void write_csv(std::ostream& os, const SimLog& log) {
  os << "t";
  for (std::size_t j = 0; j < log.joint_names.size(); ++j) os << ",q_" << j;
  for (const auto& name : log.joint_names) os << ",h_" << name;
  for (const auto& e : log.task_effectors) {
    os << ',' << e << "_desired_x," << e << "_desired_y," << e << "_desired_z,"
       << e << "_dir_x," << e << "_dir_y," << e << "_dir_z," << e
       << "_cartesian_error," << e << "_angular_error," << e << "_residual";
  }
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  for (const LogRecord& r : log.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.t);
    os << buf;
    for (Eigen::Index j = 0; j < r.q.size(); ++j) put(r.q(j));
    for (Eigen::Index j = 0; j < r.h.size(); ++j) put(r.h(j));
    for (const TaskSample& s : r.tasks) {
      for (int k = 0; k < 3; ++k) put(s.desired(k));
      for (int k = 0; k < 3; ++k) put(s.direction(k));
      put(s.error.cartesian);
      put(s.error.angular);
      put(s.residual);
    }
    os << '\n';
  }
}

struct ErrorStats {
  double max = 0.0;
  double mean = 0.0;
};

struct EffectorSummary {
  std::string effector;
  ErrorStats angular;
  ErrorStats cartesian;
  double max_residual = 0.0;
};

struct RunSummary {
  std::string scenario;
  long steps = 0;
  std::vector<EffectorSummary> effectors;
  int limit_episodes = 0;  // 0 -> positive transitions of h, over all joints
  double wall_ms = 0.0;
};

/// Number of times h leaves zero on joint `j`.
inline int activation_episodes(const SimLog& log, int joint) {
  int count = 0;
  bool active = false;
  for (const LogRecord& r : log.records) {
    const bool now = r.h(joint) > 0.0;
    if (now && !active) ++count;
    active = now;
  }
  return count;
}

inline RunSummary summarize(const SimLog& log, double wall_ms = 0.0) {
  RunSummary s;
  s.scenario = log.scenario;
  s.steps = static_cast<long>(log.records.size());
  s.wall_ms = wall_ms;
  for (std::size_t i = 0; i < log.task_effectors.size(); ++i) {
    EffectorSummary e;
    e.effector = log.task_effectors[i];
    for (const LogRecord& r : log.records) {
      const TaskSample& ts = r.tasks[i];
      e.angular.max = std::max(e.angular.max, ts.error.angular);
      e.cartesian.max = std::max(e.cartesian.max, ts.error.cartesian);
      e.angular.mean += ts.error.angular;
      e.cartesian.mean += ts.error.cartesian;
      e.max_residual = std::max(e.max_residual, ts.residual);
    }
    if (!log.records.empty()) {
      e.angular.mean /= static_cast<double>(log.records.size());
      e.cartesian.mean /= static_cast<double>(log.records.size());
    }
    s.effectors.push_back(e);
  }
  for (std::size_t j = 0; j < log.joint_names.size(); ++j) {
    s.limit_episodes += activation_episodes(log, static_cast<int>(j));
  }
  return s;
}

inline Json summary_to_json(const RunSummary& s) {
  Json doc;
  doc["scenario"] = s.scenario;
  doc["steps"] = s.steps;
  doc["limit_activation_episodes"] = s.limit_episodes;
  doc["wall_clock_ms"] = s.wall_ms;
  doc["effectors"] = Json::array();
  for (const auto& e : s.effectors) {
    doc["effectors"].push_back({{"effector", e.effector},
                                {"angular_error_max", e.angular.max},
                                {"angular_error_mean", e.angular.mean},
                                {"cartesian_error_max", e.cartesian.max},
                                {"cartesian_error_mean", e.cartesian.mean},
                                {"residual_max", e.max_residual}});
  }
  return doc;
}

}  // namespace gazectl
