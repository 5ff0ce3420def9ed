#pragma once

#include <stdexcept>
#include <string>

namespace irtsmooth {

enum class ErrorKind
{
  parse,
  domain,
  input,
  degenerate,
  empty_neighborhood,
  io
};

const char* to_string(ErrorKind kind) noexcept;

//! Structured diagnostic raised by every module. `module` and `operation`
//! name where the failure happened; `location` is free text such as
//! "row 4, column 2" and may be empty.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind,
        std::string module,
        std::string operation,
        const std::string& message,
        std::string location = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }
  const std::string& location() const noexcept { return location_; }
  const std::string& message() const noexcept { return message_; }

private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
  std::string location_;
  std::string message_;
};

} // namespace irtsmooth
