#ifndef HYCA_ERROR_HPP
#define HYCA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hyca {

/// Broad failure category. The CLI maps each category to an exit code.
enum class ErrorKind {
  Validation,  // bad arguments, violated preconditions
  Io,          // file could not be opened / written
  Format,      // malformed HYCA / CSV / JSON content
  Numerical,   // overflow, non-finite values produced by a computation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::Numerical, what) {}
};

/// Distinct reasons a trajectory file is rejected.
enum class FormatErrc {
  BadMagic,
  VersionMismatch,
  BadDtype,
  BadHeader,
  Truncated,
  TrailingBytes,
  NonFinite,
  BadCsv,
  BadJson,
};

const char* to_string(FormatErrc code) noexcept;

class FormatError : public Error {
 public:
  FormatError(FormatErrc code, const std::string& detail)
      : Error(ErrorKind::Format, std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  FormatErrc code() const noexcept { return code_; }

 private:
  FormatErrc code_;
};

inline const char* to_string(FormatErrc code) noexcept {
  switch (code) {
    case FormatErrc::BadMagic:
      return "bad magic";
    case FormatErrc::VersionMismatch:
      return "version mismatch";
    case FormatErrc::BadDtype:
      return "bad dtype";
    case FormatErrc::BadHeader:
      return "bad header";
    case FormatErrc::Truncated:
      return "truncated";
    case FormatErrc::TrailingBytes:
      return "trailing bytes";
    case FormatErrc::NonFinite:
      return "non-finite value";
    case FormatErrc::BadCsv:
      return "bad csv";
    case FormatErrc::BadJson:
      return "bad json";
  }
  return "unknown";
}

}  // namespace hyca

#endif  // HYCA_ERROR_HPP
