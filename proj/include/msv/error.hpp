#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace msv {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent configuration (shape mismatch, bad sidecar, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Value outside its domain (site index out of range, empty view, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid algorithm parameter (beta < 2, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Classifier / inference engine failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed input file.
class InputError : public Error {
 public:
  using Error::Error;
};

// A search that could not complete (recursion cap exceeded).
class RunError : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::function<void(const std::string&)>;

// Routes library warnings. The default sink writes to stderr.
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace msv
