#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace injnorm {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("ShapeError", m) {}
};
struct FieldError : Error {
  explicit FieldError(const std::string& m) : Error("FieldError", m) {}
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& m) : Error("CapacityError", m) {}
};
struct SpecError : Error {
  explicit SpecError(const std::string& m) : Error("SpecError", m) {}
};
struct ZeroTensorError : Error {
  explicit ZeroTensorError(const std::string& m) : Error("ZeroTensorError", m) {}
};
struct RankError : Error {
  explicit RankError(const std::string& m) : Error("RankError", m) {}
};
struct IndexError : Error {
  explicit IndexError(const std::string& m) : Error("IndexError", m) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error("FormatError", m) {}
};

/// Raised when a descent step produces a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& m)
      : Error("DivergenceError", m), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace injnorm
