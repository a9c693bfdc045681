#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ttr {

// All library failures are reported as an Error carrying a stable,
// machine-readable code (e.g. "DanglingHeldOutBase") plus a human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace ttr
