#pragma once

#include <stdexcept>
#include <string>

namespace spinnet {

// Exit-code contract shared by the library and the CLI:
//   0 success, 2 bad input, 3 physics precondition violated, 4 I/O failure.
enum class ExitCode : int {
    ok = 0,
    validation = 2,
    physics = 3,
    io = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

// Malformed parameters, sizes, ranges, unknown keys.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(ExitCode::validation, msg) {}
};

// Numerically valid input for which the requested treatment is not applicable
// (near-resonant bulk mode, degenerate subspace, no transport channel, ...).
class PhysicsError : public Error {
public:
    explicit PhysicsError(const std::string& msg) : Error(ExitCode::physics, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ExitCode::io, msg) {}
};

}  // namespace spinnet
