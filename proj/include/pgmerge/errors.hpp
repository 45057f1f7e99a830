#pragma once

#include <stdexcept>
#include <string>

namespace pgmerge {

/// Bad arguments or violated preconditions. CLI exit code 1.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents (bad magic, truncation, inconsistent records).
/// CLI exit code 2.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / OS failures. CLI exit code 2.
struct EnvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace pgmerge
