#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace htpg {

// Base for every error raised by the library. The C API maps each subclass
// onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated type invariant.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Closed-form density/score requested for a tail index outside {1, 2}.
class UnsupportedMemberError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. stepping a terminal environment state.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Step-size schedule incompatible with the chosen update rule.
class ScheduleError : public Error {
 public:
  ScheduleError(const std::string& what, std::int64_t k) : Error(what), k_(k) {}
  std::int64_t k() const { return k_; }

 private:
  std::int64_t k_;
};

// Parameters became non-finite during an optimization run.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t episode,
                  std::int64_t update)
      : Error(what), episode_(episode), update_(update) {}
  std::int64_t episode() const { return episode_; }
  std::int64_t update() const { return update_; }

 private:
  std::int64_t episode_;
  std::int64_t update_;
};

// Config file problem. line() is 0 when the error is about a field value
// rather than syntax; path() names the offending field when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, std::string path = {})
      : Error(what), line_(line), path_(std::move(path)) {}
  int line() const { return line_; }
  const std::string& path() const { return path_; }

 private:
  int line_;
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace htpg
