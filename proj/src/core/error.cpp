#include "dimscope/error.hpp"

namespace dimscope {

const char* nameOf(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::DegenerateDim: return "DegenerateDim";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::Format: return "Format";
    case ErrorCode::DegenerateLayout: return "DegenerateLayout";
    case ErrorCode::CliqueExplosion: return "CliqueExplosion";
    case ErrorCode::NoCategoricalDim: return "NoCategoricalDim";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::RevisionConflict: return "RevisionConflict";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace dimscope
