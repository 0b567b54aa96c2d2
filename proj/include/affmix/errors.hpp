#ifndef AFFMIX_ERRORS_HPP
#define AFFMIX_ERRORS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace affmix {

enum class ErrorCode {
  InvalidArgument,
  SingularMatrix,
  NonConvergence,
  OrderMismatch,
  InvariantSubspace,
  StateSpaceTooLarge,
  ModulusNotCoprime,
  ZeroFrequency,
  FactorNonpositive,
  NoTorsion,
  GammaTooLarge,
  OutOfRange,
  ConfigInvalid,
  InsufficientData,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::InvariantSubspace: return "InvariantSubspace";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::ModulusNotCoprime: return "ModulusNotCoprime";
    case ErrorCode::ZeroFrequency: return "ZeroFrequency";
    case ErrorCode::FactorNonpositive: return "FactorNonpositive";
    case ErrorCode::NoTorsion: return "NoTorsion";
    case ErrorCode::GammaTooLarge: return "GammaTooLarge";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
/// `detail()` holds an auxiliary index when one is meaningful (for
/// FactorNonpositive, the first failing power j).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> detail = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> detail_;
};

}  // namespace affmix

#endif  // AFFMIX_ERRORS_HPP
