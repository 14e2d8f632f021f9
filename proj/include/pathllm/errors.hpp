#pragma once

#include <stdexcept>
#include <string>

namespace pathllm {

// Bad or unresolvable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A query that cannot be answered on the given graph, e.g. an unmatched
// keyword or terminals split across components of G* (CLI exit code 3).
class InfeasibleQueryError : public std::runtime_error {
 public:
  explicit InfeasibleQueryError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Failure inside a named pipeline phase (CLI exit code 4).
class PhaseError : public std::runtime_error {
 public:
  PhaseError(const std::string& phase, const std::string& msg)
      : std::runtime_error("phase '" + phase + "': " + msg), phase_(phase) {}
  const std::string& phase() const { return phase_; }

 private:
  std::string phase_;
};

}  // namespace pathllm
