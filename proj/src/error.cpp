#include "hef/error.hpp"

namespace hef {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::MissingTimestamp: return "MissingTimestamp";
    case ErrorCode::DiskNotFound: return "DiskNotFound";
    case ErrorCode::OffDisk: return "OffDisk";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::SingularStructureTensor: return "SingularStructureTensor";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateComponent: return "DegenerateComponent";
    case ErrorCode::OffDiskCentroid: return "OffDiskCentroid";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadConfig: return "BadConfig";
    }
    return "UnknownError";
}

} // namespace hef
