#pragma once

#include <stdexcept>
#include <string>

namespace memdrift {

/// Root of every error the library throws. The CLI maps each subclass to its own exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (corpus, config, suite, cache record).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a structural invariant (unknown entity, duplicate id, ...).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Invalid or infeasible parameters for sampling, layout or scoring.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A selector found no valid unit (no edge, no node of the requested degree, no k-clique).
class NoValidUnitError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage was invoked before the artifact it consumes exists.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CacheMissError : public Error {
 public:
  CacheMissError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Live endpoint failures.

class AuthError : public Error {
 public:
  using Error::Error;
};

class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class RetriesExhaustedError : public Error {
 public:
  RetriesExhaustedError(std::size_t attempts, const std::string& what)
      : Error(what), attempts_(attempts) {}
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

}  // namespace memdrift
