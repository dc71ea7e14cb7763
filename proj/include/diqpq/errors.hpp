#pragma once

#include <stdexcept>
#include <string>

namespace diqpq {

// Caller broke a documented precondition (non-Hermitian operator, unnormalized
// state, length mismatch, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sampling path only supports real-amplitude bases and POVMs.
class UnsupportedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ProtocolConfig arithmetic constraint violated. The message names the
// constraint, e.g. "(1-2*gamma)*K != k*N".
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RetriesExhausted : public std::runtime_error {
 public:
  RetriesExhausted(const std::string& what, unsigned attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  unsigned attempts() const noexcept { return attempts_; }

 private:
  unsigned attempts_;
};

}  // namespace diqpq
