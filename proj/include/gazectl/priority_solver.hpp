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

// Prioritized velocity-level inverse kinematics with joint limit tasks.
//
// Operational tasks are resolved in order, each in the null space of all
// tasks above it. Joint limit tasks sit above every operational task and
// are blended in with intermediate desired values: a joint inside its
// activation buffer requests
//
//   h * k (center - q) + (1 - h) * (velocity the same solve would give that
//                                   joint if its limit row were absent),
//
// so the stack can grow and shrink without a jump in the solution.

#pragma once

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gazectl/kinematics.hpp"

namespace gazectl {

struct Task {
  std::string name;
  MatX jacobian;  // r x n
  VecX dx;        // r
};

enum class LimitMode {
  kIdv,       // smooth activation with intermediate desired values
  kHard,      // activation snapped to {0, 1}: rows inserted on buffer entry
  kDisabled,  // no joint limit tasks
};

struct SolverConfig {
  double sigma_rel = 1e-8;     // truncation relative to the largest singular value
  double sigma_floor = 1e-12;  // absolute truncation floor
  double joint_limit_gain = 0.001;
  LimitMode limit_mode = LimitMode::kIdv;
};

struct ActiveLimit {
  int joint = -1;
  double h = 0.0;
  double dx_limit = 0.0;  // k (center - q)
  double dx_idv = 0.0;    // blended value the row actually requested
};

struct SolverOutput {
  VecX dq;
  std::vector<VecX> per_task_dq;  // limit stack first when present
  std::vector<ActiveLimit> active_limits;
  std::vector<double> residuals;  // |J dq - dx| per operational task
};

/// Moore-Penrose pseudoinverse by SVD. Singular values at or below
/// max(sigma_rel * sigma_max, sigma_floor) are treated as zero.
inline MatX pseudoinverse(const MatX& m, double sigma_rel = 1e-8,
                          double sigma_floor = 1e-12) {
  if (m.size() == 0) return MatX::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();
  const double cutoff = std::max(sigma_rel * s(0), sigma_floor);
  VecX inv = VecX::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline MatX pseudoinverse(const MatX& m, const SolverConfig& cfg) {
  return pseudoinverse(m, cfg.sigma_rel, cfg.sigma_floor);
}

/// Accumulated null-space projectors N_[1], ..., N_[m] of a task stack.
/// N_[k] = N_[k-1] (I - (J_k N_[k-1])^+ (J_k N_[k-1])), N_[0] = I.
inline std::vector<MatX> nullspace_chain(const std::vector<MatX>& jacobians,
                                         Eigen::Index n,
                                         const SolverConfig& cfg = {}) {
  std::vector<MatX> chain;
  chain.reserve(jacobians.size());
  MatX acc = MatX::Identity(n, n);
  for (const MatX& j : jacobians) {
    const MatX projected = j * acc;
    acc = acc - pseudoinverse(projected, cfg) * projected;
    chain.push_back(acc);
  }
  return chain;
}

/// Recursive prioritized solve. Task s receives
///   dq_s = (J_s N_[s-1])^+ (dx_s - J_s sum_{k<s} dq_k).
inline SolverOutput prioritized_dq(const std::vector<Task>& tasks,
                                   Eigen::Index n,
                                   const SolverConfig& cfg = {}) {
  SolverOutput out;
  out.dq = VecX::Zero(n);
  MatX null = MatX::Identity(n, n);
  for (const Task& t : tasks) {
    const MatX projected = t.jacobian * null;
    const MatX pinv = pseudoinverse(projected, cfg);
    VecX step = pinv * (t.dx - t.jacobian * out.dq);
    out.dq += step;
    out.per_task_dq.push_back(std::move(step));
    null -= pinv * projected;
  }
  for (const Task& t : tasks) {
    out.residuals.push_back((t.jacobian * out.dq - t.dx).norm());
  }
  return out;
}

/// Activation of a joint limit task: 1 at or past a limit, 0 outside the
/// buffers, and a C1 cubic smoothstep across each buffer.
inline double activation_h(double q, const JointDef& joint) {
  const double beta = joint.buffer;
  double u;
  if (q <= joint.q_min || q >= joint.q_max) return 1.0;
  if (q < joint.q_min + beta) {
    u = (q - joint.q_min) / beta;
  } else if (q > joint.q_max - beta) {
    u = (joint.q_max - q) / beta;
  } else {
    return 0.0;
  }
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

/// Pull toward the joint center.
inline double limit_dx(double q, const JointDef& joint, double gain = 0.001) {
  return gain * (joint.center() - q);
}

/// Intermediate desired value for a limit row.
inline double idv_dx(double h, double dx_limit,
                     const Eigen::Ref<const Eigen::RowVectorXd>& row,
                     const VecX& dq_without) {
  return h * dx_limit + (1.0 - h) * row.dot(dq_without);
}

namespace detail {

class IdvRecursion {
 public:
  IdvRecursion(const std::vector<ActiveLimit>& limits,
               const std::vector<Task>& op_tasks, Eigen::Index n,
               const SolverConfig& cfg)
      : limits_(limits), op_tasks_(op_tasks), n_(n), cfg_(cfg) {}

  // Solve with the limit rows whose bits are set in `mask`.
  SolverOutput solve(std::uint64_t mask) {
    std::vector<Task> stack;
    if (mask != 0) {
      Task top;
      top.name = "joint_limits";
      const int rows = std::popcount(mask);
      top.jacobian = MatX::Zero(rows, n_);
      top.dx = VecX::Zero(rows);
      int r = 0;
      for (std::size_t i = 0; i < limits_.size(); ++i) {
        if (!(mask & (std::uint64_t{1} << i))) continue;
        const ActiveLimit& lim = limits_[i];
        top.jacobian(r, lim.joint) = 1.0;
        const double without =
            lim.h < 1.0 ? dq_without(mask & ~(std::uint64_t{1} << i))(lim.joint)
                        : 0.0;
        top.dx(r) = lim.h * lim.dx_limit + (1.0 - lim.h) * without;
        ++r;
      }
      stack.push_back(std::move(top));
    }
    stack.insert(stack.end(), op_tasks_.begin(), op_tasks_.end());
    SolverOutput out = prioritized_dq(stack, n_, cfg_);
    if (mask != 0) out.residuals.erase(out.residuals.begin());
    return out;
  }

 private:
  const VecX& dq_without(std::uint64_t mask) {
    auto it = memo_.find(mask);
    if (it == memo_.end()) it = memo_.emplace(mask, solve(mask).dq).first;
    return it->second;
  }

  const std::vector<ActiveLimit>& limits_;
  const std::vector<Task>& op_tasks_;
  Eigen::Index n_;
  const SolverConfig& cfg_;
  std::unordered_map<std::uint64_t, VecX> memo_;
};

}  // namespace detail

/// Solves the stack [limit rows; op_tasks] for explicit limit rows. Each
/// row's intermediate value uses the solution without that row, computed
/// recursively; solutions are memoized on the set of rows present.
inline SolverOutput idv_solve(const std::vector<ActiveLimit>& limits,
                              const std::vector<Task>& op_tasks,
                              Eigen::Index n, const SolverConfig& cfg = {}) {
  if (limits.size() >= 64) throw Error("too many joint limit rows");
  detail::IdvRecursion rec(limits, op_tasks, n, cfg);
  const std::uint64_t all =
      limits.empty() ? 0 : (~std::uint64_t{0} >> (64 - limits.size()));
  SolverOutput out = rec.solve(all);
  out.active_limits = limits;
  if (!limits.empty()) {
    // Unit rows: the top task's contribution carries each requested value.
    const VecX& top = out.per_task_dq.front();
    for (std::size_t i = 0; i < limits.size(); ++i) {
      out.active_limits[i].dx_idv = top(limits[i].joint);
    }
  }
  return out;
}

/// Activation of every joint at `q` under the configured limit mode.
inline VecX joint_activations(const RobotModel& model, const VecX& q,
                              LimitMode mode) {
  VecX h = VecX::Zero(model.dof());
  if (mode == LimitMode::kDisabled) return h;
  for (int j = 0; j < model.dof(); ++j) {
    const double a = activation_h(q(j), model.joints[j]);
    h(j) = mode == LimitMode::kHard ? (a > 0.0 ? 1.0 : 0.0) : a;
  }
  return h;
}

/// Full controller step: limit rows for every joint with h > 0 at the top,
/// then `op_tasks` in priority order.
inline SolverOutput solve_with_limits(const RobotModel& model, const VecX& q,
                                      const std::vector<Task>& op_tasks,
                                      const SolverConfig& cfg = {}) {
  const VecX h = joint_activations(model, q, cfg.limit_mode);
  std::vector<ActiveLimit> limits;
  for (int j = 0; j < model.dof(); ++j) {
    if (h(j) > 0.0) {
      limits.push_back(
          {j, h(j), limit_dx(q(j), model.joints[j], cfg.joint_limit_gain)});
    }
  }
  return idv_solve(limits, op_tasks, model.dof(), cfg);
}

}  // namespace gazectl
