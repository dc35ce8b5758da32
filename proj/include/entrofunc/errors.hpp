#pragma once

#include <stdexcept>
#include <string>

namespace entrofunc {

// Sample too small for the requested functional order.
class InsufficientSampleError : public std::runtime_error {
 public:
  explicit InsufficientSampleError(const std::string& what)
      : std::runtime_error(what) {}
};

// Requested (family, order) pair has neither a closed form nor a numeric
// fallback.
class UnsupportedPairError : public std::runtime_error {
 public:
  explicit UnsupportedPairError(const std::string& what)
      : std::runtime_error(what) {}
};

// The literal subset enumeration would exceed its work guard.
class EnumerationGuardError : public std::runtime_error {
 public:
  explicit EnumerationGuardError(const std::string& what)
      : std::runtime_error(what) {}
};

// Experiment or distribution configuration failed validation; the message
// names the offending keys.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed data file.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entrofunc
