#pragma once

#include <stdexcept>
#include <string>

namespace polyball {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  overflow,
  not_in_polyball,
  indefinite_defect,
  numerical_instability,
  not_invariant,
  completion_failed,
  parse_error,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind so the
// CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace polyball
