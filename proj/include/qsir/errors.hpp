#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qsir {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (e.g. q <= 1, negative compartment).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text. Carries the 1-based line and/or the key involved.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::string key = {})
      : Error(format(message, line, key)), line_(line), key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(const std::string& message, std::size_t line, const std::string& key) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!key.empty()) out += " (key '" + key + "')";
    return out + ": " + message;
  }

  std::size_t line_;
  std::string key_;
};

/// The closed-form solution needs y(t0) > 0.
class ZeroInfected : public Error {
 public:
  ZeroInfected() : Error("initial infected fraction is zero; closed form undefined (use the recurrence)") {}
};

/// NaN or infinity entered (or escaped from) a computation.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(std::string what, std::optional<std::size_t> index = std::nullopt)
      : Error(index ? what + " at index " + std::to_string(*index) : what), index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class IoError : public Error {
 public:
  IoError(const std::string& message, std::string path)
      : Error(message + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qsir
