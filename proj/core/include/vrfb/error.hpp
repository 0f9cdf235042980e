#pragma once

#include <stdexcept>
#include <string>

namespace vrfb {

/// Input outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Electrolyte closure produced a non-physical composition.
class CompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value met while assembling residuals.
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration or file-format problem; maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vrfb
