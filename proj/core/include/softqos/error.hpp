#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace softqos {

/// Input failed schema or invariant checks. Carries one diagnostic per
/// violation so callers can report all of them at once.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> diagnostics);
  explicit ValidationError(std::string diagnostic);

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// A lookup by id (class, call, catalog parameter) found nothing.
class NotFoundError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An operation was called with arguments that violate its precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace softqos
