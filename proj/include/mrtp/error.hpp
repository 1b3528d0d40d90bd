// Copyright 2026 The mrtp Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrtp {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A configurable size bound was exceeded (automaton states, enumeration
// atoms, joint search states).
class ResourceError : public Error {
 public:
  using Error::Error;
};

// The global specification cannot be satisfied by the team.
class SpecInfeasible : public Error {
 public:
  using Error::Error;
};

// The allocation model has no (remaining) satisfying assignment.
class AllocationInfeasible : public Error {
 public:
  using Error::Error;
};

// No accepting run exists in a robot's product automaton.
class PlanInfeasible : public Error {
 public:
  using Error::Error;
};

// A run never performs one of the collaborative tasks assigned to it.
class MissingCollaborativeState : public Error {
 public:
  using Error::Error;
};

// Malformed scenario or plan document. `path` is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error("schema error at " + (path.empty() ? std::string("/") : path) +
              ": " + what),
        path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A well-formed document that violates a domain invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// The time budget ran out before any solution was found.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace mrtp
