#include "gqdisc/error.hpp"

namespace gqd {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Input: return "input error";
        case ErrorCode::Degenerate: return "degenerate data";
        case ErrorCode::NotPositiveDefinite: return "not positive definite";
        case ErrorCode::Numerical: return "numerical failure";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::Domain: return "domain error";
        case ErrorCode::Unbounded: return "unbounded";
        case ErrorCode::Config: return "configuration error";
    }
    return "unknown error";
}

}  // namespace gqd
