#include "kpz/error.hpp"

namespace kpz {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::PoleOnContour: return "PoleOnContour";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ContourConflict: return "ContourConflict";
    case ErrorKind::NumericalInconsistency: return "NumericalInconsistency";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::IncompatibleInputs: return "IncompatibleInputs";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace kpz
