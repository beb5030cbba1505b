#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace rmtlab {

// Precondition violated by the caller (bad index, malformed spec, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested value cannot be represented or enumerated within budget.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class UnsupportedOrder : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two ensembles whose atoms do not share a variance convention.
class IncompatibleEnsembles : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An experiment whose outcome is trivially zero (e.g. identical fourth moments).
class DegenerateExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Where a sampled matrix came from; enough to regenerate it bit-exactly.
struct SampleOrigin {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint32_t stream = 0;
};

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::optional<SampleOrigin> origin)
      : std::runtime_error(describe(what, origin)), origin_(origin) {}

  const std::optional<SampleOrigin>& origin() const noexcept { return origin_; }

 private:
  static std::string describe(const std::string& what,
                              const std::optional<SampleOrigin>& origin) {
    if (!origin) return what;
    return what + " (seed " + std::to_string(origin->seed) + ", trial " +
           std::to_string(origin->trial) + ", stream " +
           std::to_string(origin->stream) + ")";
  }

  std::optional<SampleOrigin> origin_;
};

}  // namespace rmtlab
