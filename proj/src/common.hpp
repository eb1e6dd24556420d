// Shared error type and small helpers used across the library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wlim {

enum class ErrorCode {
    InvalidArgument = 1,  // bad parameters, malformed specs, domain violations
    Numeric = 2,          // solver failures, saturation, degenerate systems
    Io = 3,               // file problems
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg);
}

[[noreturn]] inline void fail_numeric(const std::string& msg) {
    throw Error(ErrorCode::Numeric, msg);
}

[[noreturn]] inline void fail_io(const std::string& msg) {
    throw Error(ErrorCode::Io, msg);
}

// Exponent guard for the log-domain representation of exponential terms.
// Double precision overflows just past e^709; staying at 700 leaves headroom
// for sums over large samples.
inline constexpr double kExpSaturationBound = 700.0;

const char* version_string();

}  // namespace wlim
