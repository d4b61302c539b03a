#pragma once

#include <stdexcept>
#include <string>

namespace nskr {

// Error categories; mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    invalid_argument = 1,
    domain = 2,
    numeric = 3,
    io = 4,
    config = 5,
    divergence = 6,
    certification = 7,
    model_shape = 8,
    stagnation = 9,
};

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

}  // namespace nskr
