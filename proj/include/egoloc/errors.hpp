#pragma once

#include <stdexcept>
#include <string>

namespace egoloc {

// Precondition violated by a caller-supplied value (wrong counts, non-finite
// numbers, unnormalized distributions, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shoulder/neck triangle too small to define a body frame.
class DegeneratePose : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A candidate has no valid (unoccluded) frame in the clip.
class InsufficientObservation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration value outside its documented range. `field()` names it.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Filesystem failure. `path()` names the offending file or directory.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace egoloc
