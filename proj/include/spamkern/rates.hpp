#pragma once

#include <cstddef>
#include <optional>

#include "spamkern/kernels.hpp"

namespace spamkern {

/// Constant in the critical-rate inequality  c * t^2 >= Q(t).
inline constexpr double kCriticalRateConstant = 40.0;

/// Regularization parameters driven by the kernel spectrum and (n, d):
///   gamma = kappa * max(nu, sqrt(log d / n)),  lambda = c * gamma,  rho = c * gamma^2.
struct RegParams {
    double nu_n = 0.0;
    double gamma_n = 0.0;
    double lambda_n = 0.0;
    double rho_n = 0.0;
    double kappa = 1.0;
    double c_mult = 16.0;
};

/// Q(t) = n^{-1/2} sqrt(sum_k min(t^2, mu_k)).
double q_sigma(double t, const SpectralKernel& kernel, std::size_t n);

/// Smallest t > 0 with constant * t^2 >= Q(t), by bisection.
double critical_rate(const SpectralKernel& kernel, std::size_t n, double constant = kCriticalRateConstant);

RegParams make_reg_params(const SpectralKernel& kernel, std::size_t n, std::size_t d, double kappa = 1.0,
                          double c_mult = 16.0);

// Rate comparators below set every unspecified universal constant to 1. They
// are meant for slopes and ratios, not absolute error levels.

/// s log(d) / n + s nu_n^2. `d` is real so that log d can be set directly.
double upper_rate(std::size_t s, double d, std::size_t n, const SpectralKernel& kernel);

/// s log(d/s) / n + s m / n  (finite-rank lower bound, requires s <= d/4).
double lower_rate_logarithmic(std::size_t s, std::size_t d, std::size_t n, std::size_t m);

/// s log(d/s) / n + s n^{-2a/(2a+1)}  (polynomial-decay lower bound, requires s <= d/4).
double lower_rate_polynomial(std::size_t s, std::size_t d, std::size_t n, double alpha);

/// max( sqrt(s log(d/s) / n), B^{1/2} (s^{1/a} log s / n)^{1/4} ).
double delta_n(std::size_t s, std::size_t d, std::size_t n, double alpha, double bound_b);

/// K_B(s, n) = B sqrt(log s) (s^{-1/(2a)} n^{1/(4a+2)})^{2a-1}.
double k_bound(std::size_t s, std::size_t n, double alpha, double bound_b);

/// Rate over the globally bounded class:
///   (1+B) s n^{-2a/(2a+1)} (K_B(s,n) + n^{-1/(2a+1)} log(d/s)).
///
/// `k_b_override` replaces K_B(s, n), which exposes the unbounded-class shape
/// (K_B = 1) for comparison.
double bounded_class_rate(std::size_t s, std::size_t d, std::size_t n, double alpha, double bound_b,
                          std::optional<double> k_b_override = std::nullopt);

/// Lower bound over the unbounded class divided by bounded_class_rate, with the
/// common factor s n^{-2a/(2a+1)} cancelled.
double rate_ratio(std::size_t s, std::size_t d, std::size_t n, double alpha, double bound_b,
                  std::optional<double> k_b_override = std::nullopt);

}  // namespace spamkern
