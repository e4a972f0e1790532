#pragma once

#include <stdexcept>
#include <string>

namespace aoaloc::app {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // estimation failed for a reason not covered below
  kExitUsage = 2,
  kExitUnlocalizable = 3,
  kExitIo = 4,
};

/// Malformed configuration; `key()` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A readable file in a layout this tool does not support.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoaloc::app
