#pragma once

#include <stdexcept>
#include <string>

namespace phishbench {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad option values, missing required settings,
/// unknown keys. Maps to process exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent input data: malformed files, unknown labels,
/// impossible sampling requests. Maps to process exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// External service failure: network errors, non-retryable HTTP statuses,
/// exhausted retries, unreachable daemons. Maps to process exit code 3.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// A model response that does not match the expected shape. Carries the raw
/// response text so callers can log what the model actually produced.
class ParseError : public DataError {
 public:
  ParseError(const std::string& message, std::string raw_text)
      : DataError(message), raw_text_(std::move(raw_text)) {}

  const std::string& raw_text() const { return raw_text_; }

 private:
  std::string raw_text_;
};

}  // namespace phishbench
