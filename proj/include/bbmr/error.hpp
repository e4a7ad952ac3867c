#pragma once

#include <stdexcept>
#include <string>

namespace bbmr {

/// Error classes surfaced by the library. The CLI maps each one onto a
/// distinct process exit code (see tools/bbmr.cpp).
enum class ErrorCode {
    invalid_argument,
    io,
    bad_magic,
    unsupported_version,
    truncated,
    crc_mismatch,
    invariant_violation,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::io: return "io";
    case ErrorCode::bad_magic: return "bad-magic";
    case ErrorCode::unsupported_version: return "unsupported-version";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::crc_mismatch: return "crc-mismatch";
    case ErrorCode::invariant_violation: return "invariant-violation";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::invalid_argument, what);
}

} // namespace bbmr
