// Exception hierarchy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace powalloc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid domain object (model, policy set, distribution, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Problem with an experiment config file (parse or semantic).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Exact-enumeration oracle asked to evaluate an instance beyond its guard.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

}  // namespace powalloc
