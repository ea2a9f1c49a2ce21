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

// Screw-axis kinematics for revolute joint trees: product-of-exponentials
// forward kinematics, spatial Jacobians and gaze task Jacobians.
//
// Twists are ordered (omega, v), so the first three rows of a spatial
// Jacobian are the world-frame angular velocity (roll, pitch, yaw).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gazectl/errors.hpp"

namespace gazectl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

struct ScrewAxis {
  Vec3 omega = Vec3::UnitZ();
  Vec3 v = Vec3::Zero();

  /// Revolute axis with direction `omega` passing through `point`.
  static ScrewAxis revolute(const Vec3& omega, const Vec3& point) {
    return {omega, -omega.cross(point)};
  }

  Vec6 twist() const {
    Vec6 s;
    s << omega, v;
    return s;
  }
};

struct Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Transform identity() { return {}; }

  static Transform from_translation(const Vec3& p) {
    return {Mat3::Identity(), p};
  }

  Transform operator*(const Transform& other) const {
    return {rotation * other.rotation,
            rotation * other.translation + translation};
  }

  Transform inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -rt * translation};
  }

  Vec3 apply(const Vec3& point) const { return rotation * point + translation; }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

/// Matrix exponential of the twist `axis` scaled by `theta` (Rodrigues).
inline Transform exp_twist(const ScrewAxis& axis, double theta) {
  const Mat3 w = skew(axis.omega);
  const Mat3 w2 = w * w;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  Transform t;
  t.rotation = Mat3::Identity() + s * w + (1.0 - c) * w2;
  t.translation =
      (Mat3::Identity() * theta + (1.0 - c) * w + (theta - s) * w2) * axis.v;
  return t;
}

/// Adjoint map [[R, 0], [[p]R, R]] taking twists expressed in the frame of
/// `t` to the reference frame.
inline Mat6 adjoint(const Transform& t) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = t.rotation;
  ad.bottomRightCorner<3, 3>() = t.rotation;
  ad.bottomLeftCorner<3, 3>() = skew(t.translation) * t.rotation;
  return ad;
}

struct JointDef {
  std::string name;
  ScrewAxis axis;
  double q_min = -std::numbers::pi / 2;
  double q_max = std::numbers::pi / 2;
  double buffer = 0.1;  // width of the activation zone at each limit
  int parent = -1;      // preceding joint on this joint's branch, -1 at root

  double center() const { return 0.5 * (q_min + q_max); }
};

struct EffectorDef {
  std::string name;
  std::vector<int> contributing_joints;  // root-first
  std::vector<int> rows;                 // angular rows kept (0=x, 1=y, 2=z)
  Transform home_pose;
};

struct RobotModel {
  std::string name;
  std::vector<JointDef> joints;
  std::vector<EffectorDef> effectors;

  int dof() const { return static_cast<int>(joints.size()); }

  const EffectorDef& effector(const std::string& label) const {
    auto it = std::find_if(effectors.begin(), effectors.end(),
                           [&](const EffectorDef& e) { return e.name == label; });
    if (it == effectors.end()) throw UnknownEffector(label);
    return *it;
  }

  int joint_index(const std::string& label) const {
    for (int i = 0; i < dof(); ++i) {
      if (joints[i].name == label) return i;
    }
    return -1;
  }

  /// Joints from the root down to and including `joint`.
  std::vector<int> branch(int joint) const {
    std::vector<int> path;
    for (int j = joint; j >= 0; j = joints[j].parent) path.push_back(j);
    std::reverse(path.begin(), path.end());
    return path;
  }
};

/// Checks every model invariant and returns one message per violation.
inline std::vector<std::string> validate(const RobotModel& model) {
  std::vector<std::string> issues;
  const int n = model.dof();
  if (n == 0) issues.push_back("joints: model has no joints");
  for (int i = 0; i < n; ++i) {
    const JointDef& j = model.joints[i];
    const std::string where =
        "joints[" + std::to_string(i) + "] (" + j.name + ")";
    const double norm = j.axis.omega.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12) {
      issues.push_back(where + ".omega: axis norm " + std::to_string(norm) +
                       " is not 1");
    }
    if (!j.axis.v.allFinite()) {
      issues.push_back(where + ".v: non-finite entries");
    }
    if (!(j.q_min < j.q_max)) {
      issues.push_back(where + ": q_min must be below q_max");
    } else if (!(j.buffer > 0.0 && j.buffer < 0.5 * (j.q_max - j.q_min))) {
      issues.push_back(where +
                       ".buffer: must lie in (0, (q_max - q_min) / 2)");
    }
    if (j.parent < -1 || j.parent >= i) {
      issues.push_back(where + ".parent: must precede the joint in the chain");
    }
  }
  for (std::size_t e = 0; e < model.effectors.size(); ++e) {
    const EffectorDef& eff = model.effectors[e];
    const std::string where =
        "effectors[" + std::to_string(e) + "] (" + eff.name + ")";
    for (std::size_t k = 0; k < e; ++k) {
      if (model.effectors[k].name == eff.name) {
        issues.push_back(where + ".name: duplicate effector name");
      }
    }
    if (eff.contributing_joints.empty()) {
      issues.push_back(where + ".joints: no contributing joints");
    } else {
      bool in_range = true;
      for (int j : eff.contributing_joints) in_range &= (j >= 0 && j < n);
      if (!in_range) {
        issues.push_back(where + ".joints: joint index out of range");
      } else {
        const int last = eff.contributing_joints.back();
        bool parents_ok = true;
        for (int i = 0; i < n; ++i) parents_ok &= model.joints[i].parent < i;
        if (parents_ok && model.branch(last) != eff.contributing_joints) {
          issues.push_back(where +
                           ".joints: must be the root-first branch ending at "
                           "joint " + std::to_string(last));
        }
      }
    }
    if (eff.rows.empty() || eff.rows.size() > 3) {
      issues.push_back(where + ".rows: must select 1 to 3 angular rows");
    }
    for (std::size_t r = 0; r < eff.rows.size(); ++r) {
      if (eff.rows[r] < 0 || eff.rows[r] > 2) {
        issues.push_back(where + ".rows: row index must be 0, 1 or 2");
      }
      for (std::size_t s = 0; s < r; ++s) {
        if (eff.rows[s] == eff.rows[r]) {
          issues.push_back(where + ".rows: duplicate row");
        }
      }
    }
    const Mat3& r = eff.home_pose.rotation;
    if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
        std::abs(r.determinant() - 1.0) > 1e-10) {
      issues.push_back(where + ".home_pose: rotation is not orthonormal");
    }
  }
  return issues;
}

/// Pose of `effector` at configuration `q`: the product of the exponentials
/// of its contributing joints, root first, times its home pose.
inline Transform forward_kinematics(const RobotModel& model, const VecX& q,
                                    const std::string& effector) {
  const EffectorDef& eff = model.effector(effector);
  Transform t;
  for (int j : eff.contributing_joints) {
    t = t * exp_twist(model.joints[j].axis, q(j));
  }
  return t * eff.home_pose;
}

/// 6 x n spatial Jacobian. Column i is the screw axis of joint i carried to
/// the current configuration by the joints preceding it on its branch.
inline MatX spatial_jacobian(const RobotModel& model, const VecX& q) {
  const int n = model.dof();
  MatX jac(6, n);
  std::vector<Transform> after(n);
  for (int i = 0; i < n; ++i) {
    const JointDef& joint = model.joints[i];
    const Transform before =
        joint.parent < 0 ? Transform::identity() : after[joint.parent];
    jac.col(i) = adjoint(before) * joint.axis.twist();
    after[i] = before * exp_twist(joint.axis, q(i));
  }
  return jac;
}

/// Angular rows of the spatial Jacobian selected for `effector`, with the
/// columns of joints outside its branch zeroed.
inline MatX task_jacobian(const RobotModel& model, const VecX& q,
                          const std::string& effector) {
  const EffectorDef& eff = model.effector(effector);
  const MatX full = spatial_jacobian(model, q);
  MatX jac = MatX::Zero(static_cast<Eigen::Index>(eff.rows.size()), model.dof());
  for (std::size_t r = 0; r < eff.rows.size(); ++r) {
    for (int j : eff.contributing_joints) {
      jac(static_cast<Eigen::Index>(r), j) = full(eff.rows[r], j);
    }
  }
  return jac;
}

namespace dreamer {

// Link lengths of the Dreamer head (m).
inline constexpr double kL1 = 0.13849;
inline constexpr double kL2 = 0.12508;
inline constexpr double kL3 = 0.053;

}  // namespace dreamer

/// The 7-DoF Dreamer head: four neck joints, a shared eye pitch and one yaw
/// joint per eye. Joint limits are configurable placeholders.
inline RobotModel dreamer_model() {
  using namespace dreamer;
  constexpr double pi = std::numbers::pi;
  auto joint = [](std::string name, Vec3 w, Vec3 v, double lim, int parent) {
    JointDef j;
    j.name = std::move(name);
    j.axis = {w, v};
    j.q_min = -lim;
    j.q_max = lim;
    j.buffer = 0.1;
    j.parent = parent;
    return j;
  };
  RobotModel m;
  m.name = "dreamer";
  m.joints = {
      joint("lower_neck_pitch", {0, -1, 0}, {0, 0, 0}, pi / 2, -1),
      joint("neck_yaw", {0, 0, 1}, {0, 0, 0}, pi / 2, 0),
      joint("neck_roll", {-1, 0, 0}, {0, -kL1, 0}, pi / 2, 1),
      joint("upper_neck_pitch", {0, -1, 0}, {kL1, 0, 0}, pi / 2, 2),
      joint("eye_pitch", {0, -1, 0}, {kL1, 0, -kL2}, pi / 4, 3),
      joint("right_eye_yaw", {0, 0, 1}, {-kL3, -kL2, 0}, pi / 4, 4),
      joint("left_eye_yaw", {0, 0, 1}, {kL3, -kL2, 0}, pi / 4, 4),
  };
  m.effectors = {
      {"head", {0, 1, 2, 3}, {0, 1, 2},
       Transform::from_translation({0, 0, kL1})},
      {"right_eye", {0, 1, 2, 3, 4, 5}, {1, 2},
       Transform::from_translation({kL2, -kL3, kL1})},
      {"left_eye", {0, 1, 2, 3, 4, 6}, {1, 2},
       Transform::from_translation({kL2, kL3, kL1})},
  };
  return m;
}

}  // namespace gazectl
