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

#pragma once

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "gazectl/errors.hpp"
#include "gazectl/kinematics.hpp"

namespace gazectl {

/// Boundary vector [s(ti), s(tf), s'(ti), s'(tf), s''(ti), s''(tf)].
using Boundary = std::array<double, 6>;
/// Quintic coefficients a0..a5 in segment-local time tau = t - ti.
using Quintic = std::array<double, 6>;

/// Coefficients of the quintic meeting all six boundary conditions.
inline Quintic min_jerk_coeffs(const Boundary& b, double t_i, double t_f) {
  if (!(t_f > t_i)) {
    throw DegenerateDuration("segment end time must exceed its start time");
  }
  const double T = t_f - t_i;
  Eigen::Matrix<double, 6, 6> B = Eigen::Matrix<double, 6, 6>::Zero();
  for (int k = 0; k < 6; ++k) {
    const double tk = std::pow(T, k);
    B(0, k) = k == 0 ? 1.0 : 0.0;
    B(1, k) = tk;
    B(2, k) = k == 1 ? 1.0 : 0.0;
    B(3, k) = k >= 1 ? k * std::pow(T, k - 1) : 0.0;
    B(4, k) = k == 2 ? 2.0 : 0.0;
    B(5, k) = k >= 2 ? k * (k - 1) * std::pow(T, k - 2) : 0.0;
  }
  const Eigen::Matrix<double, 6, 1> rhs =
      Eigen::Map<const Eigen::Matrix<double, 6, 1>>(b.data());
  const Eigen::Matrix<double, 6, 1> a = B.partialPivLu().solve(rhs);
  Quintic out;
  for (int k = 0; k < 6; ++k) out[k] = a(k);
  return out;
}

struct MotionSample {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

/// One-dimensional minimum-jerk segment on [t_i, t_f].
class MinJerkSegment {
 public:
  MinJerkSegment(const Boundary& b, double t_i, double t_f)
      : coeffs_(min_jerk_coeffs(b, t_i, t_f)), boundary_(b), t_i_(t_i), t_f_(t_f) {}

  /// Rest-to-rest motion from `from` to `to`.
  static MinJerkSegment rest_to_rest(double from, double to, double t_i,
                                     double t_f) {
    return {{from, to, 0.0, 0.0, 0.0, 0.0}, t_i, t_f};
  }

  /// Horner evaluation; t is clamped to the segment interval and the
  /// endpoints return the boundary values verbatim.
  MotionSample eval(double t) const {
    if (t <= t_i_) return {boundary_[0], boundary_[2], boundary_[4]};
    if (t >= t_f_) return {boundary_[1], boundary_[3], boundary_[5]};
    const double tau = std::clamp(t, t_i_, t_f_) - t_i_;
    const auto& a = coeffs_;
    MotionSample s;
    s.position =
        a[0] + tau * (a[1] + tau * (a[2] + tau * (a[3] + tau * (a[4] + tau * a[5]))));
    s.velocity = a[1] + tau * (2 * a[2] + tau * (3 * a[3] + tau * (4 * a[4] + tau * 5 * a[5])));
    s.acceleration = 2 * a[2] + tau * (6 * a[3] + tau * (12 * a[4] + tau * 20 * a[5]));
    return s;
  }

  const Quintic& coeffs() const { return coeffs_; }
  double t_i() const { return t_i_; }
  double t_f() const { return t_f_; }

 private:
  Quintic coeffs_;
  Boundary boundary_;
  double t_i_;
  double t_f_;
};

struct WaypointPath {
  std::vector<Vec3> waypoints;
  std::vector<double> durations;  // one per segment
  std::vector<double> dwell;      // pause at each waypoint; empty = none

  std::vector<std::string> validate() const {
    std::vector<std::string> issues;
    if (waypoints.size() < 2) issues.push_back("waypoints: need at least 2");
    if (durations.size() + 1 != waypoints.size()) {
      issues.push_back("durations: need one per segment");
    }
    for (double d : durations) {
      if (!(d > 0.0)) issues.push_back("durations: must be positive");
    }
    if (!dwell.empty() && dwell.size() != waypoints.size()) {
      issues.push_back("dwell: need one per waypoint");
    }
    for (double d : dwell) {
      if (!(d >= 0.0)) issues.push_back("dwell: must be non-negative");
    }
    for (const Vec3& p : waypoints) {
      if (!p.allFinite()) issues.push_back("waypoints: non-finite point");
    }
    return issues;
  }
};

/// Piecewise rest-to-rest quintic through a waypoint path, evaluated as a
/// time-varying fixation point.
class FixationTrajectory {
 public:
  explicit FixationTrajectory(WaypointPath path) : path_(std::move(path)) {
    if (auto issues = path_.validate(); !issues.empty()) {
      throw ValidationError(std::move(issues));
    }
    double t = 0.0;
    for (std::size_t s = 0; s + 1 < path_.waypoints.size(); ++s) {
      t += dwell(s);
      const double t_f = t + path_.durations[s];
      Segment seg{t, t_f, {}};
      for (int d = 0; d < 3; ++d) {
        seg.axes.push_back(MinJerkSegment::rest_to_rest(
            path_.waypoints[s](d), path_.waypoints[s + 1](d), t, t_f));
      }
      segments_.push_back(std::move(seg));
      arrivals_.push_back(t_f);
      t = t_f;
    }
    total_ = t + dwell(path_.waypoints.size() - 1);
  }

  double total_duration() const { return total_; }

  /// Time at which waypoint `i` (i >= 1) is reached.
  double arrival_time(std::size_t i) const {
    return i == 0 ? 0.0 : arrivals_.at(i - 1);
  }

  Vec3 sample(double t) const {
    t = std::clamp(t, 0.0, total_);
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      const Segment& seg = segments_[s];
      if (t < seg.t_i) return path_.waypoints[s];
      if (t <= seg.t_f) {
        return {seg.axes[0].eval(t).position, seg.axes[1].eval(t).position,
                seg.axes[2].eval(t).position};
      }
    }
    return path_.waypoints.back();
  }

  const WaypointPath& path() const { return path_; }

 private:
  struct Segment {
    double t_i;
    double t_f;
    std::vector<MinJerkSegment> axes;
  };

  double dwell(std::size_t i) const {
    return path_.dwell.empty() ? 0.0 : path_.dwell[i];
  }

  WaypointPath path_;
  std::vector<Segment> segments_;
  std::vector<double> arrivals_;
  double total_ = 0.0;
};

inline Vec3 sample_fixation(const FixationTrajectory& path, double t) {
  return path.sample(t);
}

}  // namespace gazectl
