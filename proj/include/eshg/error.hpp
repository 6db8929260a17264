#pragma once

#include <stdexcept>
#include <string>

namespace eshg {

enum class ErrorCode : int {
    InvalidArgument = 1,
    NoSolution = 2,
    NoConvergence = 3,
    WrongRegion = 4,
    BlowUp = 5,
    DomainTooShort = 6,
    Degenerate = 7,
    Internal = 99,
};

/// Every failure raised by the numerical core carries one of the codes above so
/// the C boundary can translate it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace eshg
