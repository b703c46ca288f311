#pragma once

#include <stdexcept>
#include <string>

namespace hef {

enum class ErrorCode {
    UnsupportedFormat,
    CorruptHeader,
    MissingTimestamp,
    DiskNotFound,
    OffDisk,
    DimensionMismatch,
    NonFinite,
    DegenerateFrame,
    SingularStructureTensor,
    InsufficientSamples,
    DegenerateComponent,
    OffDiskCentroid,
    InvalidScenario,
    IoError,
    BadConfig,
};

const char* error_code_name(ErrorCode code);

/// All library failures surface as this exception; `code()` identifies the
/// failure class so callers and tests can dispatch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace hef
