#include <instanton_gas/error.hpp>

namespace instanton_gas {

Error::Error(std::string code, const std::string& message, std::string parameter)
    : std::runtime_error(message), code_(std::move(code)), parameter_(std::move(parameter)) {}

void invalid_argument(const std::string& parameter, const std::string& message) {
  throw Error("invalid_argument", message, parameter);
}

}  // namespace instanton_gas
