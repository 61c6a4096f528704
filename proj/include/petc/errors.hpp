#pragma once

#include <stdexcept>
#include <string>

namespace petc {

// Exit codes of the command-line tool; each error type maps onto one.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kSolverTransport = 3,
  kSolverUnknown = 4,
  kVerification = 5,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const { return ExitCode::kConfig; }
};

/// Invalid system data, configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A state outside the domain of an operation (e.g. V(x) > V0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Solver could not be started, crashed or replied with something unparseable.
class SolverTransportError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const override { return ExitCode::kSolverTransport; }
};

/// Solver returned unknown / timed out where a decision was required.
class SolverUnknownError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const override { return ExitCode::kSolverUnknown; }
};

/// A certified quantity turned out inconsistent with the concrete semantics.
class VerificationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const override { return ExitCode::kVerification; }
};

}  // namespace petc
