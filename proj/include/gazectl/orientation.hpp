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

// Gaze orientation targets and world-frame orientation errors.
//
// A gaze frame points its first axis at a fixation point; the error between
// the current and desired frames is taken in the world frame and turned into
// an angular displacement task dx = k * theta * axis.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazectl/errors.hpp"
#include "gazectl/kinematics.hpp"

namespace gazectl {

inline constexpr double kDefaultMinFixationDistance = 1e-6;  // m
inline constexpr double kDefaultParallelTolerance = 1e-6;

struct AxisAngle {
  Vec3 axis = Vec3::UnitX();
  double angle = 0.0;  // [0, pi]

  Vec3 vector() const { return angle * axis; }
};

/// Unit quaternion (w, x, y, z). Values produced by this library are
/// canonical: w >= 0, so the rotation angle lies in [0, pi]. At exactly pi
/// the vector part's first nonzero component is positive.
struct UnitQuaternion {
  double w = 1.0;
  Vec3 xyz = Vec3::Zero();

  static UnitQuaternion identity() { return {}; }

  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 u = axis.normalized();
    return UnitQuaternion{std::cos(angle / 2), std::sin(angle / 2) * u}
        .canonical();
  }

  /// Largest-diagonal (Shepperd) extraction, stable near angle pi.
  static UnitQuaternion from_rotation(const Mat3& r) {
    const double tr = r.trace();
    UnitQuaternion q;
    if (tr >= r(0, 0) && tr >= r(1, 1) && tr >= r(2, 2)) {
      const double s = 2.0 * std::sqrt(1.0 + tr);
      q.w = 0.25 * s;
      q.xyz = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
      const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
      q.w = (r(2, 1) - r(1, 2)) / s;
      q.xyz = Vec3(0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s);
    } else if (r(1, 1) >= r(2, 2)) {
      const double s = 2.0 * std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
      q.w = (r(0, 2) - r(2, 0)) / s;
      q.xyz = Vec3((r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s);
    } else {
      const double s = 2.0 * std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
      q.w = (r(1, 0) - r(0, 1)) / s;
      q.xyz = Vec3((r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s);
    }
    return q.normalized().canonical();
  }

  double norm() const { return std::sqrt(w * w + xyz.squaredNorm()); }

  UnitQuaternion normalized() const {
    const double n = norm();
    return {w / n, xyz / n};
  }

  UnitQuaternion conjugate() const { return {w, -xyz}; }

  /// Representative of {q, -q} with angle in [0, pi].
  UnitQuaternion canonical() const {
    if (w > 0.0) return *this;
    if (w < 0.0) return {-w, -xyz};
    for (int i = 0; i < 3; ++i) {
      if (xyz(i) > 0.0) return {0.0, xyz};
      if (xyz(i) < 0.0) return {0.0, -xyz};
    }
    return identity();
  }

  UnitQuaternion operator*(const UnitQuaternion& o) const {
    return {w * o.w - xyz.dot(o.xyz), w * o.xyz + o.w * xyz + xyz.cross(o.xyz)};
  }

  Mat3 rotation() const {
    const Mat3 k = skew(xyz);
    return Mat3::Identity() + 2.0 * w * k + 2.0 * k * k;
  }

  AxisAngle axis_angle() const {
    const UnitQuaternion c = canonical();
    const double s = c.xyz.norm();
    if (s == 0.0) return {};
    return {c.xyz / s, 2.0 * std::atan2(s, c.w)};
  }

  Eigen::Vector4d coeffs() const { return {w, xyz.x(), xyz.y(), xyz.z()}; }
};

struct GazeFrame {
  Vec3 i;  // gaze direction
  Vec3 j;
  Vec3 k;

  Mat3 rotation() const {
    Mat3 r;
    r << i, j, k;
    return r;
  }
};

/// Desired orientation whose first axis points from `origin` at `target`,
/// with its third axis the projection of `fixed` onto the orthogonal plane.
inline GazeFrame gaze_frame(const Vec3& origin, const Vec3& target,
                            const Vec3& fixed = Vec3::UnitZ(),
                            double min_distance = kDefaultMinFixationDistance,
                            double parallel_tol = kDefaultParallelTolerance) {
  const Vec3 p = target - origin;
  const double dist = p.norm();
  if (!(dist > min_distance)) {
    throw DegenerateFixation("fixation point coincides with the frame origin");
  }
  GazeFrame f;
  f.i = p / dist;
  const double c = fixed.dot(f.i);
  if (!(std::abs(c) < 1.0 - parallel_tol)) {
    throw ParallelFixedVector("fixed frame vector is parallel to the gaze");
  }
  f.k = (fixed - f.i * c).normalized();
  f.j = f.k.cross(f.i);
  return f;
}

/// World-frame rotation carrying `current` onto `desired`.
inline Mat3 rotation_error(const Mat3& current, const Mat3& desired) {
  return desired * current.transpose();
}

inline UnitQuaternion quat_error(const UnitQuaternion& current,
                                 const UnitQuaternion& desired) {
  return (desired * current.conjugate()).normalized().canonical();
}

/// Angular displacement k * theta * axis that removes the error `q_e`.
inline Vec3 gaze_task_dx(const UnitQuaternion& q_e, double gain = 1.0) {
  return gain * q_e.axis_angle().vector();
}

}  // namespace gazectl
