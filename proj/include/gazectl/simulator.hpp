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

// Closed-loop kinematic simulation of prioritized gaze tasks.
//
// One step advances the clock by dt: the scenario's perturbation moves the
// joints, every gaze task is rebuilt from the current pose and the fixation
// target at the new time, the prioritized solve produces dq, and the joints
// are integrated (explicit Euler) and clamped to their hard limits. The
// record for the step is taken after the update.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gazectl/kinematics.hpp"
#include "gazectl/orientation.hpp"
#include "gazectl/priority_solver.hpp"
#include "gazectl/trajectory.hpp"

namespace gazectl {

struct GazeErrorSample {
  double angular = 0.0;    // rad
  double cartesian = 0.0;  // m
};

/// Error between the gaze ray of `frame` and the fixation point `target`,
/// with the Cartesian part measured at the target's depth along the ray.
inline GazeErrorSample gaze_error(const Transform& frame, const Vec3& target,
                                  double min_distance = kDefaultMinFixationDistance) {
  const Vec3 p = target - frame.translation;
  const double depth = p.norm();
  if (!(depth > min_distance)) {
    throw DegenerateFixation("fixation point coincides with the frame origin");
  }
  const Vec3 gaze = frame.rotation.col(0);
  const double c = std::clamp(gaze.dot(p / depth), -1.0, 1.0);
  return {std::acos(c), (target - (frame.translation + depth * gaze)).norm()};
}

/// Fixed point or minimum-jerk waypoint path.
using FixationSource = std::variant<Vec3, FixationTrajectory>;

inline Vec3 fixation_at(const FixationSource& src, double t) {
  if (const auto* p = std::get_if<Vec3>(&src)) return *p;
  return std::get<FixationTrajectory>(src).sample(t);
}

struct GazeTaskSpec {
  std::string effector;
  int priority = 1;  // 1 = highest operational priority
  double gain = 1.0;
  Vec3 fixed_vector = Vec3::UnitZ();
  // Use the effector's current third axis instead of `fixed_vector`, so the
  // desired frame keeps the present roll about the gaze axis.
  bool fixed_vector_from_current = false;
  Vec3 fallback_vector = Vec3::UnitY();
  FixationSource fixation = Vec3(1.0, 0.0, 0.0);
};

/// Additive joint offset p(t). Between steps the joint is displaced by
/// p(t + dt) - p(t).
struct Perturbation {
  int joint = 0;
  // Sinusoid amplitude * sin(2 pi frequency t + phase), used when `times`
  // is empty; otherwise piecewise-linear samples held at the ends.
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  std::vector<double> times;
  std::vector<double> values;

  double offset(double t) const {
    if (times.empty()) {
      return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
    }
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double a = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return values[k - 1] + a * (values[k] - values[k - 1]);
  }
};

struct Scenario {
  std::string name = "scenario";
  RobotModel model;
  double dt = 0.01;
  double duration = 1.0;
  std::optional<VecX> initial_q;
  std::vector<GazeTaskSpec> tasks;
  std::vector<Perturbation> perturbations;
  SolverConfig solver;

  int step_count() const {
    // Guard against 0.3 / 0.1 = 2.9999999999999996 style round-up.
    return static_cast<int>(std::ceil(duration / dt - 1e-9));
  }
};

inline std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> issues;
  for (const auto& m : validate(s.model)) issues.push_back("model." + m);
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) issues.push_back("dt: must be positive");
  if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
    issues.push_back("duration: must be positive");
  }
  if (s.initial_q && s.initial_q->size() != s.model.dof()) {
    issues.push_back("initial_q: length must equal the joint count");
  } else if (s.initial_q) {
    for (int j = 0; j < s.model.dof(); ++j) {
      const auto& jd = s.model.joints[j];
      const double v = (*s.initial_q)(j);
      if (!(v >= jd.q_min && v <= jd.q_max)) {
        issues.push_back("initial_q[" + std::to_string(j) +
                         "]: outside the joint limits");
      }
    }
  }
  if (!(s.solver.sigma_rel >= 0.0) || !(s.solver.sigma_floor >= 0.0)) {
    issues.push_back("gains.sigma_min: must be non-negative");
  }
  if (!std::isfinite(s.solver.joint_limit_gain)) {
    issues.push_back("gains.joint_limit: must be finite");
  }
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    const GazeTaskSpec& t = s.tasks[i];
    const std::string where = "tasks[" + std::to_string(i) + "]";
    bool known = false;
    for (const auto& e : s.model.effectors) known |= e.name == t.effector;
    if (!known) issues.push_back(where + ".effector: unknown effector '" + t.effector + "'");
    for (std::size_t k = 0; k < i; ++k) {
      if (s.tasks[k].priority == t.priority) {
        issues.push_back(where + ".priority: duplicate priority " +
                         std::to_string(t.priority));
      }
      if (s.tasks[k].effector == t.effector) {
        issues.push_back(where + ".effector: effector already has a task");
      }
    }
    if (!std::isfinite(t.gain)) issues.push_back(where + ".gain: must be finite");
    if (std::abs(t.fixed_vector.norm() - 1.0) > 1e-9) {
      issues.push_back(where + ".fixed_vector: must be a unit vector");
    }
  }
  for (std::size_t i = 0; i < s.perturbations.size(); ++i) {
    const Perturbation& p = s.perturbations[i];
    const std::string where = "perturbation[" + std::to_string(i) + "]";
    if (p.joint < 0 || p.joint >= s.model.dof()) {
      issues.push_back(where + ".joint: out of range");
    }
    if (p.times.size() != p.values.size()) {
      issues.push_back(where + ".values: length must match times");
    }
    for (std::size_t k = 1; k < p.times.size(); ++k) {
      if (!(p.times[k] > p.times[k - 1])) {
        issues.push_back(where + ".times: must be strictly increasing");
        break;
      }
    }
  }
  return issues;
}

struct TaskSample {
  Vec3 desired = Vec3::Zero();    // fixation point
  Vec3 direction = Vec3::Zero();  // achieved gaze axis after the update
  GazeErrorSample error;
  double residual = 0.0;  // |J dq - dx| of the task in this step's solve
};

struct LogRecord {
  double t = 0.0;
  VecX q;
  VecX h;   // activation per joint used by the solve
  VecX dq;  // solver output before clamping
  std::vector<TaskSample> tasks;  // priority order
};

struct SimLog {
  std::string scenario;
  std::vector<std::string> joint_names;
  std::vector<std::string> task_effectors;  // priority order
  std::vector<LogRecord> records;
};

class Simulator {
 public:
  explicit Simulator(Scenario scenario) : sc_(std::move(scenario)) {
    if (auto issues = validate(sc_); !issues.empty()) {
      throw ValidationError(std::move(issues));
    }
    std::stable_sort(sc_.tasks.begin(), sc_.tasks.end(),
                     [](const GazeTaskSpec& a, const GazeTaskSpec& b) {
                       return a.priority < b.priority;
                     });
    q_ = sc_.initial_q.value_or(VecX::Zero(sc_.model.dof()));
  }

  const Scenario& scenario() const { return sc_; }
  const VecX& q() const { return q_; }
  double time() const { return step_ * sc_.dt; }

  /// Gaze tasks at configuration `q` for fixation targets at time `t`.
  std::vector<Task> build_tasks(const VecX& q, double t) const {
    std::vector<Task> tasks;
    tasks.reserve(sc_.tasks.size());
    for (const GazeTaskSpec& spec : sc_.tasks) {
      const Transform pose = forward_kinematics(sc_.model, q, spec.effector);
      const Vec3 target = fixation_at(spec.fixation, t);
      const Vec3 fixed = spec.fixed_vector_from_current
                             ? Vec3(pose.rotation.col(2))
                             : spec.fixed_vector;
      GazeFrame desired;
      try {
        desired = gaze_frame(pose.translation, target, fixed);
      } catch (const ParallelFixedVector&) {
        desired = gaze_frame(pose.translation, target, spec.fallback_vector);
      }
      const UnitQuaternion q_c = UnitQuaternion::from_rotation(pose.rotation);
      const UnitQuaternion q_d = UnitQuaternion::from_rotation(desired.rotation());
      const Vec3 dx = gaze_task_dx(quat_error(q_c, q_d), spec.gain);
      const EffectorDef& eff = sc_.model.effector(spec.effector);
      Task task;
      task.name = spec.effector;
      task.jacobian = task_jacobian(sc_.model, q, spec.effector);
      task.dx.resize(static_cast<Eigen::Index>(eff.rows.size()));
      for (std::size_t r = 0; r < eff.rows.size(); ++r) {
        task.dx(static_cast<Eigen::Index>(r)) = dx(eff.rows[r]);
      }
      tasks.push_back(std::move(task));
    }
    return tasks;
  }

  LogRecord step() {
    const double t0 = time();
    const double t1 = (step_ + 1) * sc_.dt;
    for (const Perturbation& p : sc_.perturbations) {
      q_(p.joint) += p.offset(t1) - p.offset(t0);
    }
    clamp(q_);

    const std::vector<Task> tasks = build_tasks(q_, t1);
    const SolverOutput out = solve_with_limits(sc_.model, q_, tasks, sc_.solver);

    LogRecord rec;
    rec.h = joint_activations(sc_.model, q_, sc_.solver.limit_mode);
    q_ += out.dq;
    clamp(q_);
    ++step_;

    rec.t = t1;
    rec.q = q_;
    rec.dq = out.dq;
    for (std::size_t i = 0; i < sc_.tasks.size(); ++i) {
      const GazeTaskSpec& spec = sc_.tasks[i];
      const Transform pose = forward_kinematics(sc_.model, q_, spec.effector);
      TaskSample s;
      s.desired = fixation_at(spec.fixation, t1);
      s.direction = pose.rotation.col(0);
      s.error = gaze_error(pose, s.desired);
      s.residual = out.residuals[i];
      rec.tasks.push_back(s);
    }
    return rec;
  }

  SimLog run() {
    SimLog log;
    log.scenario = sc_.name;
    for (const auto& j : sc_.model.joints) log.joint_names.push_back(j.name);
    for (const auto& t : sc_.tasks) log.task_effectors.push_back(t.effector);
    const int n = sc_.step_count();
    log.records.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) log.records.push_back(step());
    return log;
  }

 private:
  void clamp(VecX& q) const {
    for (int j = 0; j < sc_.model.dof(); ++j) {
      q(j) = std::clamp(q(j), sc_.model.joints[j].q_min, sc_.model.joints[j].q_max);
    }
  }

  Scenario sc_;
  VecX q_;
  long step_ = 0;
};

inline SimLog run(Scenario scenario) {
  return Simulator(std::move(scenario)).run();
}

}  // namespace gazectl
