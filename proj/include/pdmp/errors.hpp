#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pdmp {

/// A distribution or parameter set that violates its own invariants.
class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Density requested from a law that has none (point masses).
class NoDensityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A modelling assumption required by a bound or construction does not hold.
/// `assumption()` names it, e.g. "H1" or "age-case-i".
class HypothesisError : public std::domain_error {
 public:
  HypothesisError(std::string assumption, const std::string& what)
      : std::domain_error("[" + assumption + "] " + what),
        assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

/// A renewal equation whose tilted kernel is not defective.
class NonDefectiveError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pdmp
