#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vitprobe {

enum class ErrorKind {
  ParseError,
  DuplicateImage,
  InconsistentObservation,
  InconsistentClass,
  EmptyTrainingSet,
  FormatError,
  TruncatedFile,
  CorruptValue,
  DimensionError,
  NumericalError,
  LabelRangeError,
  MissingFeature,
  EmptyObservation,
  DuplicateObservation,
  ShapeError,
  UnknownClass,
  MissingObservation,
  ExtraObservation,
  InsufficientData,
  ConfigError,
  IoError,
};

std::string_view kind_name(ErrorKind kind) noexcept;

/// Every failure raised by the library. `what()` is prefixed with the kind
/// name so a one-line diagnostic always identifies the failing category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace vitprobe
