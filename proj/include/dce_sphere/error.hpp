#pragma once

#include <stdexcept>
#include <string>

namespace dce {

/// Argument outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (root search, quadrature, time integration) did not
/// reach its accuracy target. The message carries the diagnostics.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root scan ran past its upper bound before collecting the requested roots.
class RootScanFailure : public NumericalFailure {
 public:
  RootScanFailure(const std::string& what, int found, int requested)
      : NumericalFailure(what), found_(found), requested_(requested) {}

  int found() const noexcept { return found_; }
  int requested() const noexcept { return requested_; }

 private:
  int found_;
  int requested_;
};

}  // namespace dce
