#include "spamkern/rates.hpp"

#include <algorithm>
#include <cmath>

#include "spamkern/error.hpp"

namespace spamkern {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw Error(ErrorCode::invalid_parameter, message);
    }
}

double as_real(std::size_t v) { return static_cast<double>(v); }

}  // namespace

double q_sigma(double t, const SpectralKernel& kernel, std::size_t n) {
    require(n >= 1, "q_sigma needs n >= 1");
    require(t >= 0.0, "q_sigma needs t >= 0");
    const double t2 = t * t;
    double sum = 0.0;
    for (double mu : kernel.eigenvalues()) {
        sum += std::min(t2, mu);
    }
    return std::sqrt(sum) / std::sqrt(as_real(n));
}

double critical_rate(const SpectralKernel& kernel, std::size_t n, double constant) {
    require(n >= 1, "critical_rate needs n >= 1");
    require(constant > 0.0, "critical-rate constant must be positive");
    const double mu1 = kernel.eigenvalues().front();
    if (!(mu1 > 0.0)) {
        throw Error(ErrorCode::no_solution, "all eigenvalues are zero, Q is identically zero");
    }
    // gap(t)/t = c t - Q(t)/t is increasing, so there is a single sign change.
    auto gap = [&](double t) { return constant * t * t - q_sigma(t, kernel, n); };
    double lo = 1e-12;
    double hi = std::sqrt(mu1) + 1.0;
    if (gap(hi) < 0.0) {
        throw Error(ErrorCode::no_solution, "bisection bracket has no sign change");
    }
    if (gap(lo) >= 0.0) {
        return lo;
    }
    while (hi - lo > 1e-14 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

RegParams make_reg_params(const SpectralKernel& kernel, std::size_t n, std::size_t d, double kappa,
                          double c_mult) {
    require(n >= 2, "regularization parameters need n >= 2");
    require(d >= 2, "regularization parameters need d >= 2");
    require(kappa > 0.0, "kappa must be positive");
    require(c_mult >= 16.0, "c_mult must be at least 16");
    RegParams p;
    p.kappa = kappa;
    p.c_mult = c_mult;
    p.nu_n = critical_rate(kernel, n);
    p.gamma_n = kappa * std::max(p.nu_n, std::sqrt(std::log(as_real(d)) / as_real(n)));
    p.lambda_n = c_mult * p.gamma_n;
    p.rho_n = c_mult * p.gamma_n * p.gamma_n;
    return p;
}

double upper_rate(std::size_t s, double d, std::size_t n, const SpectralKernel& kernel) {
    require(s >= 1 && as_real(s) <= d, "upper_rate needs 1 <= s <= d");
    const double nu = critical_rate(kernel, n);
    return as_real(s) * std::log(d) / as_real(n) + as_real(s) * nu * nu;
}

double lower_rate_logarithmic(std::size_t s, std::size_t d, std::size_t n, std::size_t m) {
    require(s >= 1 && 4 * s <= d, "logarithmic lower bound needs 1 <= s <= d/4");
    require(n >= 1, "n must be positive");
    const double ss = as_real(s);
    return ss * std::log(as_real(d) / ss) / as_real(n) + ss * as_real(m) / as_real(n);
}

double lower_rate_polynomial(std::size_t s, std::size_t d, std::size_t n, double alpha) {
    require(s >= 1 && 4 * s <= d, "polynomial lower bound needs 1 <= s <= d/4");
    require(alpha > 0.5, "smoothness must exceed 1/2");
    require(n >= 1, "n must be positive");
    const double ss = as_real(s);
    const double nn = as_real(n);
    return ss * std::log(as_real(d) / ss) / nn + ss * std::pow(nn, -2.0 * alpha / (2.0 * alpha + 1.0));
}

double delta_n(std::size_t s, std::size_t d, std::size_t n, double alpha, double bound_b) {
    require(s >= 2 && s <= d, "delta_n needs 2 <= s <= d");
    require(alpha > 0.5 && bound_b >= 0.0 && n >= 1, "delta_n needs alpha > 1/2, B >= 0, n >= 1");
    const double ss = as_real(s);
    const double nn = as_real(n);
    const double subset = std::sqrt(ss * std::log(as_real(d) / ss) / nn);
    const double bounded = std::sqrt(bound_b) * std::pow(std::pow(ss, 1.0 / alpha) * std::log(ss) / nn, 0.25);
    return std::max(subset, bounded);
}

double k_bound(std::size_t s, std::size_t n, double alpha, double bound_b) {
    require(s >= 2, "k_bound needs s >= 2");
    require(alpha > 0.5 && bound_b >= 0.0 && n >= 1, "k_bound needs alpha > 1/2, B >= 0, n >= 1");
    const double base = std::pow(as_real(s), -1.0 / (2.0 * alpha)) * std::pow(as_real(n), 1.0 / (4.0 * alpha + 2.0));
    return bound_b * std::sqrt(std::log(as_real(s))) * std::pow(base, 2.0 * alpha - 1.0);
}

double bounded_class_rate(std::size_t s, std::size_t d, std::size_t n, double alpha, double bound_b,
                          std::optional<double> k_b_override) {
    require(s >= 2 && s <= d, "bounded_class_rate needs 2 <= s <= d");
    const double nn = as_real(n);
    const double ss = as_real(s);
    const double tail = std::pow(nn, -1.0 / (2.0 * alpha + 1.0)) * std::log(as_real(d) / ss);
    return (1.0 + bound_b) * ss * std::pow(nn, -2.0 * alpha / (2.0 * alpha + 1.0)) *
           (k_b_override.value_or(k_bound(s, n, alpha, bound_b)) + tail);
}

double rate_ratio(std::size_t s, std::size_t d, std::size_t n, double alpha, double bound_b,
                  std::optional<double> k_b_override) {
    require(s >= 2 && s <= d, "rate_ratio needs 2 <= s <= d");
    const double tail = std::pow(as_real(n), -1.0 / (2.0 * alpha + 1.0)) * std::log(as_real(d) / as_real(s));
    return (1.0 + tail) / ((1.0 + bound_b) * (k_b_override.value_or(k_bound(s, n, alpha, bound_b)) + tail));
}

}  // namespace spamkern
