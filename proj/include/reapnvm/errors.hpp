#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reapnvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed document, invalid parameters, violated invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
  ValidationError(const std::string& what, std::vector<std::string> violations)
      : Error(what + join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An iterative procedure ran out of iterations or could not bracket its
/// target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace reapnvm
