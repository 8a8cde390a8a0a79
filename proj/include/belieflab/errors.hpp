#pragma once

#include <stdexcept>
#include <string>

namespace belieflab {

// Base class for all domain errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An observed response has zero likelihood under every type with positive
// prior mass. In these environments that indicates a broken likelihood rule,
// so it is surfaced instead of silently resetting the belief.
struct ZeroEvidence : Error {
  using Error::Error;
};

struct PolicyActionOutOfRange : Error {
  using Error::Error;
};

struct WrongEnvironment : Error {
  using Error::Error;
};

struct RecommendBeforeFinalTurn : Error {
  using Error::Error;
};

struct EpisodeOver : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct StateSpaceCapExceeded : Error {
  using Error::Error;
};

struct WrongArity : Error {
  using Error::Error;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace belieflab
