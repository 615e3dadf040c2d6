#pragma once

#include <stdexcept>
#include <string>

namespace shelfmem {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad field values, schema mismatch).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Scene generation could not place all objects within the attempt budget.
class SceneGenError : public Error {
 public:
  using Error::Error;
};

/// Planning could not produce a feasible action.
class PlanningError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Replay of a logged episode diverged from the stored results.
class ReplayMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace shelfmem
