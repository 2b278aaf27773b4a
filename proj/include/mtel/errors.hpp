#pragma once

#include <stdexcept>
#include <string>

namespace mtel {

// Error kinds mirror the operation contracts; the CLI maps them to exit codes
// (cost_guard -> 3, everything else here -> 2; verification failures are report
// content, not exceptions).
enum class errc {
  singular_curve,
  bad_reduction,
  limit_exceeded,
  not_additive,
  small_prime,
  invalid_twist,
  bad_prime,
  not_isolated,
  no_eigenspace,
  non_integral_coefficient,
  not_unit_root,
  inconsistent_fit,
  not_stabilized,
  not_pot_ordinary_shape,
  unknown_label,
  cost_guard,
  twist_not_ordinary,
  bad_input,
  io_error,
  internal,
};

inline const char* errc_name(errc k) {
  switch (k) {
    case errc::singular_curve: return "SingularCurve";
    case errc::bad_reduction: return "BadReduction";
    case errc::limit_exceeded: return "LimitExceeded";
    case errc::not_additive: return "NotAdditive";
    case errc::small_prime: return "SmallPrime";
    case errc::invalid_twist: return "InvalidTwist";
    case errc::bad_prime: return "BadPrime";
    case errc::not_isolated: return "NotIsolated";
    case errc::no_eigenspace: return "NoEigenspace";
    case errc::non_integral_coefficient: return "NonIntegralCoefficient";
    case errc::not_unit_root: return "NotUnitRoot";
    case errc::inconsistent_fit: return "Inconsistent";
    case errc::not_stabilized: return "NotStabilized";
    case errc::not_pot_ordinary_shape: return "NotPotOrdinaryShape";
    case errc::unknown_label: return "UnknownLabel";
    case errc::cost_guard: return "CostGuard";
    case errc::twist_not_ordinary: return "TwistNotOrdinary";
    case errc::bad_input: return "BadInput";
    case errc::io_error: return "IoError";
    case errc::internal: return "Internal";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + what),
        kind_(kind) {}
  errc kind() const { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) {
  throw error(kind, what);
}

}  // namespace mtel
