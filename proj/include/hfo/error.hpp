#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hfo {

// Error categories map 1:1 onto CLI exit codes (config=2, data=3, internal=4).
enum class ErrorKind { Config, Data, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  static Error config(std::string msg) { return {ErrorKind::Config, std::move(msg)}; }
  static Error data(std::string msg) { return {ErrorKind::Data, std::move(msg)}; }
  static Error internal(std::string msg) { return {ErrorKind::Internal, std::move(msg)}; }

private:
  ErrorKind kind_;
};

} // namespace hfo
