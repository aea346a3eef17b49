#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace expfam {

/// Failure classes raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  OutOfSupport,
  DomainError,
  Unsupported,
  EmptyInput,
  NonFinite,
  QuadratureFailure,
  SingularHessian,
  InvalidDistribution,
  IndexOutOfRange,
  SupportMismatch,
  DimensionMismatch,
  DegenerateStatistics,
  Infeasible,
  NotConverged,
  OracleScaleExceeded,
  DegenerateNullSpace,
  NonInjectiveOnSupport,
  ImpossibleMacrostate,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OutOfSupport: return "OutOfSupport";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::SingularHessian: return "SingularHessian";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateStatistics: return "DegenerateStatistics";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::OracleScaleExceeded: return "OracleScaleExceeded";
    case ErrorKind::DegenerateNullSpace: return "DegenerateNullSpace";
    case ErrorKind::NonInjectiveOnSupport: return "NonInjectiveOnSupport";
    case ErrorKind::ImpossibleMacrostate: return "ImpossibleMacrostate";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A checked mathematical relation failed. Carries the offending relation and
/// the probability vector (or other numeric witness) that broke it.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string relation, std::vector<double> witness, const std::string& what)
      : Error(ErrorKind::InvariantViolation, what),
        relation_(std::move(relation)),
        witness_(std::move(witness)) {}

  const std::string& relation() const noexcept { return relation_; }
  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  std::string relation_;
  std::vector<double> witness_;
};

}  // namespace expfam
