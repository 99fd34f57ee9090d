#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptmap {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  io = 3,
  format = 4,
  validation = 5,
  config = 6,
  numerical = 7,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace ptmap
