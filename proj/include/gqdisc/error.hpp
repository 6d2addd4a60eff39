#pragma once

#include <stdexcept>
#include <string>

namespace gqd {

enum class ErrorCode {
    Input = 1,          // malformed or out-of-range arguments
    Degenerate,         // data without spread
    NotPositiveDefinite,
    Numerical,          // iteration cap or bracket failure
    Infeasible,         // moment targets outside the reachable cone
    Domain,             // evaluation outside the feasible set
    Unbounded,
    Config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised by cholesky(); carries the 1-based index of the failing pivot.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(int pivot, const std::string& what)
        : Error(ErrorCode::NotPositiveDefinite, what), pivot_(pivot) {}

    [[nodiscard]] int pivot() const noexcept { return pivot_; }

private:
    int pivot_;
};

}  // namespace gqd
