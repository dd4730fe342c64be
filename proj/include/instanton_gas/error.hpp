#pragma once

#include <stdexcept>
#include <string>

namespace instanton_gas {

/// Error raised by every module. `code` is a stable machine-readable tag
/// (e.g. "no_wells", "cancellation"); `parameter` names the offending input
/// when there is one.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string parameter = {});

  const std::string& code() const noexcept { return code_; }
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string code_;
  std::string parameter_;
};

[[noreturn]] void invalid_argument(const std::string& parameter, const std::string& message);

}  // namespace instanton_gas
