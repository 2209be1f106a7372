#include "tlp/error.hpp"

namespace tlp {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidScale: return "InvalidScale";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::MassMismatch: return "MassMismatch";
    case ErrorKind::ChannelMismatch: return "ChannelMismatch";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoSuchComponent: return "NoSuchComponent";
    case ErrorKind::DegenerateRow: return "DegenerateRow";
    case ErrorKind::DegenerateDensity: return "DegenerateDensity";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::EmptyTrain: return "EmptyTrain";
    case ErrorKind::RankError: return "RankError";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidGamma: return "InvalidGamma";
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::InvalidPrice: return "InvalidPrice";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::SuggestsLogDomain: return "SuggestsLogDomain";
    case ErrorKind::Undefined: return "Undefined";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace tlp
