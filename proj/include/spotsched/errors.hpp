// Copyright 2026 The spotsched Authors
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

#ifndef SPOTSCHED_ERRORS_HPP_
#define SPOTSCHED_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace spotsched {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Workflow edge relation contains a cycle.
class CycleError : public Error {
 public:
  CycleError(const std::string& message, std::string edge_src, std::string edge_dst)
      : Error(message), src(std::move(edge_src)), dst(std::move(edge_dst)) {}
  std::string src;
  std::string dst;
};

// An identifier does not resolve (dangling edge endpoint, unknown task).
class ReferenceError : public Error {
 public:
  using Error::Error;
};

// Malformed cluster, workload, or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation not permitted in the current object state.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Scheduler chose a dead or unfit node; the environment is left unchanged.
class InvalidAction : public Error {
 public:
  using Error::Error;
};

class NoFeasibleAction : public Error {
 public:
  using Error::Error;
};

// NaN or Inf encountered in network parameters or outputs.
class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

// Checkpoint does not match the cluster it is applied to.
class LayoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace spotsched

#endif  // SPOTSCHED_ERRORS_HPP_
