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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed here on purpose.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace gazectl;
using gazectl::testing::Rng;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

SimLog run_bundled(const std::string& name, double* wall_s = nullptr) {
  const Scenario sc = load_scenario(testing::scenario_path(name));
  const auto t0 = std::chrono::steady_clock::now();
  SimLog log = run(sc);
  if (wall_s) *wall_s = seconds_since(t0);
  return log;
}

int task_index(const SimLog& log, const std::string& effector) {
  for (std::size_t i = 0; i < log.task_effectors.size(); ++i) {
    if (log.task_effectors[i] == effector) return static_cast<int>(i);
  }
  return -1;
}

// 1. Spatial Jacobian against central differences of forward kinematics.
Outcome jacobian_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  const RobotModel m = dreamer_model();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const VecX q = rng.config(m);
    const MatX j = spatial_jacobian(m, q);
    for (int i = 0; i < m.dof(); ++i) {
      worst = std::max(worst, (j.col(i) - testing::fd_jacobian_column(m, q, i, 1e-7))
                                  .cwiseAbs().maxCoeff());
    }
  }
  const double s = seconds_since(t0);
  return {worst < 1e-5 && s < 5.0,
          fmt("max |J - J_fd| = %.2e (tol 1e-5), %.3f s (limit 5 s)", worst, s)};
}

// 2. Spatial Jacobian at the zero configuration equals the screw axes.
Outcome screw_axis_regression() {
  using namespace dreamer;
  Eigen::Matrix<double, 6, 7> table;
  table << 0, 0, -1, 0, 0, 0, 0,
           -1, 0, 0, -1, -1, 0, 0,
           0, 1, 0, 0, 0, 1, 1,
           0, 0, 0, kL1, kL1, -kL3, kL3,
           0, 0, -kL1, 0, 0, -kL2, -kL2,
           0, 0, 0, 0, -kL2, 0, 0;
  const MatX j = spatial_jacobian(dreamer_model(), VecX::Zero(7));
  const double err = (j - table).cwiseAbs().maxCoeff();
  const double eps = std::numeric_limits<double>::epsilon();
  return {err <= eps, fmt("max deviation %.2e (tol %.2e)", err, eps)};
}

// 3. Top task undisturbed by lower tasks; projector laws.
Outcome priority_invariance() {
  Rng rng(103);
  double top = 0.0, idem = 0.0, annihil = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 2;
    std::vector<Task> tasks;
    std::vector<MatX> js;
    for (int s = 0; s < m; ++s) {
      Task t;
      t.jacobian = rng.matrix(rng.integer(1, 3), 7);
      t.dx = rng.vector(t.jacobian.rows());
      js.push_back(t.jacobian);
      tasks.push_back(t);
    }
    const VecX dq = prioritized_dq(tasks, 7).dq;
    const VecX solo = testing::pinv_full_row_rank(js[0]) * tasks[0].dx;
    top = std::max(top, (js[0] * dq - js[0] * solo).norm());
    const auto chain = nullspace_chain(js, 7);
    for (int k = 0; k < m; ++k) {
      idem = std::max(idem, (chain[k] * chain[k] - chain[k]).cwiseAbs().maxCoeff());
      for (int s = 0; s <= k; ++s) {
        annihil = std::max(annihil, (js[s] * chain[k]).cwiseAbs().maxCoeff());
      }
    }
  }
  return {top < 1e-8 && idem < 1e-8 && annihil < 1e-8,
          fmt("top-task drift %.2e, |N^2-N| %.2e, |J N| %.2e (tol 1e-8)", top, idem,
              annihil)};
}

// 4. Sweep one eye joint across its activation boundary with fixed task
// velocities; compare step changes of dq under smooth and hard insertion.
Outcome idv_continuity() {
  const RobotModel m = dreamer_model();
  const int joint = 5;
  const JointDef& jd = m.joints[joint];
  const double boundary = jd.q_max - jd.buffer;
  const Eigen::Vector2d eye_dx(0.0, 0.02);
  const Vec3 head_dx(0.0, 0.0, 0.01);

  auto sweep = [&](LimitMode mode, std::vector<double>& changes,
                   std::vector<double>& in_region) {
    SolverConfig cfg;
    cfg.limit_mode = mode;
    VecX prev;
    double prev_h = 0.0;
    for (int k = -500; k <= 500; ++k) {
      VecX q = VecX::Zero(7);
      q(joint) = boundary + k * 1e-4;
      std::vector<Task> tasks{{"right_eye", task_jacobian(m, q, "right_eye"), eye_dx},
                              {"left_eye", task_jacobian(m, q, "left_eye"), eye_dx},
                              {"head", task_jacobian(m, q, "head"), head_dx}};
      const VecX dq = solve_with_limits(m, q, tasks, cfg).dq;
      const double h = activation_h(q(joint), jd);
      if (prev.size()) {
        const double d = (dq - prev).norm();
        changes.push_back(d);
        if (prev_h > 0.0 && h > 0.0) in_region.push_back(d);
      }
      prev = dq;
      prev_h = h;
    }
  };
  std::vector<double> idv, idv_in, hard, hard_in;
  sweep(LimitMode::kIdv, idv, idv_in);
  sweep(LimitMode::kHard, hard, hard_in);
  const double med = median(idv_in);
  const double idv_max = *std::max_element(idv.begin(), idv.end());
  const double hard_max = *std::max_element(hard.begin(), hard.end());
  return {idv_max < 10.0 * med && hard_max > 100.0 * med,
          fmt("in-region median %.2e; smooth max %.2e (%.1fx, need <10x); "
              "hard max %.2e (%.0fx, need >100x)",
              med, idv_max, idv_max / med, hard_max, hard_max / med)};
}

// 5. Eyes hold a fixed point while the head's square drives them into
// their limits.
Outcome fig5_replica() {
  double wall = 0.0;
  const SimLog log = run_bundled("fig5_fixed_eye_head_square", &wall);
  const Scenario sc = load_scenario(testing::scenario_path("fig5_fixed_eye_head_square"));
  const int head = task_index(log, "head");
  const int re = task_index(log, "right_eye"), le = task_index(log, "left_eye");
  const std::vector<int> eye_joints{4, 5, 6};

  double eye_max = 0.0, head_sat_max = 0.0;
  std::vector<bool> saturated;
  for (const LogRecord& r : log.records) {
    eye_max = std::max({eye_max, r.tasks[re].error.cartesian, r.tasks[le].error.cartesian});
    bool sat = false;
    for (int j : eye_joints) sat |= r.h(j) > 0.0;
    saturated.push_back(sat);
    if (sat) head_sat_max = std::max(head_sat_max, r.tasks[head].error.cartesian);
  }

  // Laps: the head path is center, four corners per lap, back to center.
  const auto& spec = *std::find_if(sc.tasks.begin(), sc.tasks.end(),
                                   [](const GazeTaskSpec& t) { return t.effector == "head"; });
  const auto& traj = std::get<FixationTrajectory>(spec.fixation);
  const std::size_t corners = traj.path().waypoints.size() - 3;
  const int laps = static_cast<int>(corners / 4);
  int min_per_lap = std::numeric_limits<int>::max();
  for (int lap = 0; lap < laps; ++lap) {
    const double t_start = traj.arrival_time(1 + 4 * lap);
    const double t_end = traj.arrival_time(1 + 4 * (lap + 1));
    int episodes = 0;
    for (int j : eye_joints) {
      bool active = false;
      for (const LogRecord& r : log.records) {
        const bool now = r.h(j) > 0.0;
        if (now && !active && r.t >= t_start && r.t < t_end) ++episodes;
        active = now;
      }
    }
    min_per_lap = std::min(min_per_lap, episodes);
  }
  if (laps == 0) min_per_lap = 0;

  const bool ok = eye_max < 1e-3 && head_sat_max > 0.01 && min_per_lap >= 2 &&
                  wall < 10.0 && std::abs(sc.dt - 0.01) < 1e-15 &&
                  std::abs(sc.duration - 60.0) < 1e-12;
  return {ok, fmt("eye max %.2e m (<1e-3), head max while saturated %.3f m (>0.01), "
                  "min episodes per lap %d over %d laps (>=2), %.2f s (<10 s)",
                  eye_max, head_sat_max, min_per_lap, laps, wall)};
}

// 6. Everything reachable: head and eyes both track.
Outcome fig4a_replica() {
  const SimLog log = run_bundled("fig4a_feasible");
  double worst = 0.0;
  for (const LogRecord& r : log.records) {
    if (r.t < 1.0) continue;
    for (const TaskSample& s : r.tasks) worst = std::max(worst, s.error.cartesian);
  }
  return {worst < 1e-3, fmt("max error after 1 s: %.2e m (tol 1e-3)", worst)};
}

// 7. Eyes counter-rotate against an imposed head oscillation.
Outcome vor_property() {
  const Scenario sc = load_scenario(testing::scenario_path("vor_perturbation"));
  bool amplitude_ok = !sc.perturbations.empty();
  for (const Perturbation& p : sc.perturbations) {
    amplitude_ok &= p.joint <= 3 && p.amplitude == 0.2 && p.frequency == 0.5;
  }
  const SimLog log = run(sc);
  double worst = 0.0;
  for (const LogRecord& r : log.records) {
    if (r.t <= 1.0) continue;
    for (const char* eye : {"right_eye", "left_eye"}) {
      worst = std::max(worst, r.tasks[task_index(log, eye)].error.angular);
    }
  }
  return {amplitude_ok && worst < 5e-3,
          fmt("max eye angular error after 1 s: %.2e rad (tol 5e-3)", worst)};
}

// 8. Quintic coefficients and boundary conditions.
Outcome min_jerk() {
  const Quintic c = min_jerk_coeffs({0, 1, 0, 0, 0, 0}, 0.0, 1.0);
  const auto oracle = testing::quintic_oracle({0, 1, 0, 0, 0, 0}, 0.0, 1.0);
  const std::array<double, 6> expect{0, 0, 0, 10, -15, 6};
  double coeff_err = 0.0;
  for (int k = 0; k < 6; ++k) {
    coeff_err = std::max({coeff_err, std::abs(c[k] - expect[k]), std::abs(oracle(k) - expect[k])});
  }
  Rng rng(108);
  double bc_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double ti = rng.uniform(-2.0, 5.0), tf = ti + rng.uniform(0.2, 4.0);
    Boundary b;
    for (double& v : b) v = rng.uniform(-2.0, 2.0);
    const Quintic q = min_jerk_coeffs(b, ti, tf);
    const auto s = testing::poly_eval(q, 0.0), e = testing::poly_eval(q, tf - ti);
    const std::array<double, 6> got{s[0], e[0], s[1], e[1], s[2], e[2]};
    for (int k = 0; k < 6; ++k) bc_err = std::max(bc_err, std::abs(got[k] - b[k]));
  }
  return {coeff_err < 1e-9 && bc_err < 1e-9,
          fmt("coefficient error %.2e, boundary error %.2e (tol 1e-9)", coeff_err, bc_err)};
}

// 9. Logged joints stay inside limits; repeated runs are bit-identical.
Outcome limits_and_determinism() {
  const std::vector<std::string> names{"fig1_dual_squares", "fig4a_feasible",
                                       "fig4b_nolimits", "fig5_fixed_eye_head_square",
                                       "vor_perturbation"};
  int violations = 0, mismatches = 0;
  for (const auto& name : names) {
    const Scenario sc = load_scenario(testing::scenario_path(name));
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const SimLog log = run(sc);
      for (const LogRecord& r : log.records) {
        for (int j = 0; j < sc.model.dof(); ++j) {
          violations += r.q(j) < sc.model.joints[j].q_min || r.q(j) > sc.model.joints[j].q_max;
        }
      }
      std::ostringstream os;
      write_csv(os, log);
      if (rep == 0) first = os.str();
      else mismatches += os.str() != first;
    }
  }
  return {violations == 0 && mismatches == 0,
          fmt("%zu scenarios: %d limit violations, %d non-identical reruns", names.size(),
              violations, mismatches)};
}

// 10. Quaternion error composition and gaze frame orthonormality.
Outcome orientation_algebra() {
  Rng rng(110);
  double comp = 0.0, ortho = 0.0, hand = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaternion qc = UnitQuaternion::from_rotation(rng.rotation());
    const UnitQuaternion qd = UnitQuaternion::from_rotation(rng.rotation());
    const Eigen::Vector4d p = (quat_error(qc, qd) * qc).coeffs();
    comp = std::max(comp, std::min((p - qd.coeffs()).norm(), (p + qd.coeffs()).norm()));

    const Vec3 origin = rng.vector(3);
    const Vec3 target = origin + rng.uniform(0.05, 5.0) * rng.unit();
    Vec3 fixed = rng.unit();
    if (std::abs(fixed.dot((target - origin).normalized())) > 0.999) fixed = Vec3::UnitZ();
    GazeFrame f;
    try {
      f = gaze_frame(origin, target, fixed);
    } catch (const ParallelFixedVector&) {
      f = gaze_frame(origin, target, Vec3::UnitY());
    }
    const Mat3 r = f.rotation();
    ortho = std::max(ortho, (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff());
    hand = std::max(hand, (f.i.cross(f.j) - f.k).norm());
  }
  return {comp < 1e-10 && ortho < 1e-10 && hand < 1e-10,
          fmt("|q_e q_c -+ q_d| %.2e, |R^T R - I| %.2e, |i x j - k| %.2e (tol 1e-10)", comp,
              ortho, hand)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"jacobian correctness", jacobian_correctness},
      {"screw-axis regression", screw_axis_regression},
      {"priority invariance", priority_invariance},
      {"smooth limit insertion", idv_continuity},
      {"fixed eyes, saturating head square", fig5_replica},
      {"feasible dual squares", fig4a_replica},
      {"vestibulo-ocular reflex", vor_property},
      {"minimum-jerk segments", min_jerk},
      {"joint limits and determinism", limits_and_determinism},
      {"orientation algebra", orientation_algebra},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %-36s %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
