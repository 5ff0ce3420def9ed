#include "irtsmooth/error.hpp"

namespace irtsmooth {

const char* to_string(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::parse:
      return "parse error";
    case ErrorKind::domain:
      return "domain error";
    case ErrorKind::input:
      return "input error";
    case ErrorKind::degenerate:
      return "degenerate input";
    case ErrorKind::empty_neighborhood:
      return "empty kernel neighborhood";
    case ErrorKind::io:
      return "i/o error";
  }
  return "error";
}

namespace {

std::string compose(ErrorKind kind,
                    const std::string& module,
                    const std::string& operation,
                    const std::string& message,
                    const std::string& location)
{
  std::string out = "[" + module + "::" + operation + "] ";
  out += to_string(kind);
  if (!location.empty())
    out += " at " + location;
  out += ": " + message;
  return out;
}

} // namespace

Error::Error(ErrorKind kind,
             std::string module,
             std::string operation,
             const std::string& message,
             std::string location)
  : std::runtime_error(compose(kind, module, operation, message, location))
  , kind_(kind)
  , module_(std::move(module))
  , operation_(std::move(operation))
  , location_(std::move(location))
  , message_(message)
{
}

} // namespace irtsmooth
