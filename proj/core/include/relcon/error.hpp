#pragma once

#include <stdexcept>
#include <string>

namespace relcon {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
    InvalidArgument,  // bad parameters, malformed input, config errors
    Infeasible,       // synthesis could not meet the bound
    Numerical,        // non-finite values, instability, non-convergence
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) {
        throw Error(ErrorKind::InvalidArgument, what);
    }
}

}  // namespace relcon
