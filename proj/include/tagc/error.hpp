#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tagc {

// Base of every error raised by the library. The CLI maps subclasses onto
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Pearson correlation is undefined for a constant vector.
class NoVariance : public Error {
 public:
  NoVariance() : Error("feature vector has zero variance") {}
};

class MissingFeatures : public Error {
 public:
  using Error::Error;
};

// LLM endpoint could not be reached within the retry budget.
class TransportError : public Error {
 public:
  using Error::Error;
};

class EmptyCompletion : public Error {
 public:
  EmptyCompletion() : Error("LLM returned an empty completion") {}
};

class TargetTooLong : public Error {
 public:
  using Error::Error;
};

// Wraps a failure inside a pipeline stage so the stage name survives.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace tagc
