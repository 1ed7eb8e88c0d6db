#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dip {

/// Input is well-formed but violates a data contract (shape mismatch, missing
/// document, unknown label, infeasible spec). The CLI maps this to exit 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file cannot be parsed or does not follow its schema. `line` is
/// 1-based, 0 when the error is not tied to a line. The CLI maps this to exit 2.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { Parse, Schema, Io };

  FormatError(Kind kind, std::string source, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), source_(std::move(source)), line_(line) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::string source_;
  std::size_t line_;
};

}  // namespace dip
