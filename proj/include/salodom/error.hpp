#pragma once

#include <stdexcept>
#include <string>

namespace salodom {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
    InvalidArgument = 1,
    Io = 2,
    Format = 3,
    Numeric = 4,
    NoCorrespondences = 5,
    Degenerate = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace salodom
