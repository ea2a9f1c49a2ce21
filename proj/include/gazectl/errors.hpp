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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gazectl {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownEffector : public Error {
 public:
  explicit UnknownEffector(const std::string& name)
      : Error("unknown effector '" + name + "'") {}
};

/// The fixation point coincides with the origin of the gaze frame.
class DegenerateFixation : public Error {
 public:
  using Error::Error;
};

/// The fixed frame vector is parallel to the gaze direction, so it cannot
/// be projected onto the plane orthogonal to it.
class ParallelFixedVector : public Error {
 public:
  using Error::Error;
};

class DegenerateDuration : public Error {
 public:
  using Error::Error;
};

/// A model or scenario violates one or more invariants. Each issue is
/// prefixed with the field path it concerns.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace gazectl
