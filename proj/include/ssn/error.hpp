#ifndef SSN_ERROR_HPP
#define SSN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssn {

/// Caller violated a precondition (index out of range, dimension mismatch,
/// double bias augmentation, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed LIBSVM or model-file input.  `line()` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line),
        detail_(what) {}

  /// Same error, reported as "<source>:<line>: <what>".
  ParseError(const std::string& source, const ParseError& e)
      : std::runtime_error(source + ":" +
                           (e.line_ ? std::to_string(e.line_) + ":" : "") + " " +
                           e.detail_),
        line_(e.line_),
        detail_(e.detail_) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// The data cannot be used for the requested task (e.g. SVC labels that do
/// not take exactly two values).
class InvalidTaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssn

#endif  // SSN_ERROR_HPP
