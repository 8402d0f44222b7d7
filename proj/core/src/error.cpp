#include "vitprobe/error.hpp"

namespace vitprobe {

std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateImage: return "DuplicateImage";
    case ErrorKind::InconsistentObservation: return "InconsistentObservation";
    case ErrorKind::InconsistentClass: return "InconsistentClass";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::CorruptValue: return "CorruptValue";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::LabelRangeError: return "LabelRangeError";
    case ErrorKind::MissingFeature: return "MissingFeature";
    case ErrorKind::EmptyObservation: return "EmptyObservation";
    case ErrorKind::DuplicateObservation: return "DuplicateObservation";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::MissingObservation: return "MissingObservation";
    case ErrorKind::ExtraObservation: return "ExtraObservation";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind), detail_(message) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace vitprobe
