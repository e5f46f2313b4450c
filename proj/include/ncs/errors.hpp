#pragma once

#include <stdexcept>
#include <string>

namespace ncs {

// Violated precondition / invariant of a library operation.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Bad user-supplied configuration (maps to CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

}  // namespace ncs
