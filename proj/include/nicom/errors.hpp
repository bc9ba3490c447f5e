//
// Copyright 2026 the nicom authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nicom {

// Base class for all typed errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A utility or objective evaluator was handed an outcome payload from a
// different application domain.
class DomainMismatchError : public Error {
 public:
  explicit DomainMismatchError(const std::string& what)
      : Error("domain mismatch: " + what) {}
};

// A pair of histories handed to the DP ratio checker differ in more than one
// round's entry.
class NotNeighborsError : public Error {
 public:
  explicit NotNeighborsError(const std::string& what)
      : Error("not neighbors: " + what) {}
};

// An exhaustive enumeration (profile space, game tree, class construction)
// would exceed the configured budget.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& what, std::int64_t budget,
                      std::int64_t required)
      : Error("instance too large: " + what + " (budget " +
              std::to_string(budget) + ", requires at least " +
              std::to_string(required) + ")"),
        budget(budget),
        required(required) {}

  std::int64_t budget;
  std::int64_t required;
};

// The commitment-lottery parameter selection produced lambda > 1.
class InfeasibleParamsError : public Error {
 public:
  InfeasibleParamsError(const std::string& what, std::int64_t min_horizon)
      : Error("infeasible: horizon too short or commitment too weak: " + what +
              " (smallest certifying horizon T = " +
              std::to_string(min_horizon) + ")"),
        min_horizon(min_horizon) {}

  std::int64_t min_horizon;
};

// Every agent's discount function is identically zero.
class DegenerateDiscountError : public Error {
 public:
  explicit DegenerateDiscountError(const std::string& what)
      : Error("degenerate discount: " + what) {}
};

// A structured configuration file is malformed or carries unknown keys.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error("config error: " + what) {}
};

// A precondition on an operation's arguments does not hold.
class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what) : Error(what) {}
};

// A structural invariant (probabilities summing to one, objective range, ...)
// was violated at runtime.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error("invariant violated: " + what) {}
};

}  // namespace nicom
