#include "spamkern/error.hpp"

namespace spamkern {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::decomposition_failure: return "decomposition-failure";
    case ErrorCode::infeasible_coefficient: return "infeasible-coefficient";
    case ErrorCode::no_solution: return "no-solution";
    case ErrorCode::not_converged: return "not-converged";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::degenerate_draw: return "degenerate-draw";
    case ErrorCode::packing_shortfall: return "packing-shortfall";
    case ErrorCode::insufficient_univariate_family: return "insufficient-univariate-family";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace spamkern
