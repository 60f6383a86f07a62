#pragma once

#include <stdexcept>
#include <string>

namespace spamkern {

enum class ErrorCode {
    invalid_parameter,
    domain_error,
    decomposition_failure,
    infeasible_coefficient,
    no_solution,
    not_converged,
    dimension_mismatch,
    degenerate_draw,
    packing_shortfall,
    insufficient_univariate_family,
    insufficient_data,
    config_error,
    io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace spamkern
