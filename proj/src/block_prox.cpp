#include "spamkern/block_prox.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "spamkern/error.hpp"

namespace spamkern {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootRelTol = 1e-13;
constexpr double kZeroTieTol = 1e-12;
constexpr double kBoundaryTol = 1e-9;

// Root of a monotone function on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bracketed_root(F f, double lo, double hi, double f_lo, double f_hi) {
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    std::uintmax_t max_iter = 500;
    auto tol = [](double x, double y) { return std::abs(x - y) <= kRootRelTol * std::max(std::abs(x), std::abs(y)); };
    const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
    return 0.5 * (bracket.first + bracket.second);
}

void check_sizes(const VectorRef& a, const VectorRef& b, const char* what) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::dimension_mismatch, what);
    }
}

// beta_i = g_i / (h_i + p d_i + q); p = inf kills every direction with d_i > 0.
struct Parametrized {
    const VectorRef& h;
    const VectorRef& g;
    const VectorRef& d;

    void fill(double p, double q, Eigen::VectorXd& beta) const {
        beta.resize(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (g(i) == 0.0 || (p == kInf && d(i) > 0.0)) {
                beta(i) = 0.0;
                continue;
            }
            const double pd = d(i) > 0.0 ? p * d(i) : 0.0;
            beta(i) = g(i) / (h(i) + pd + q);
        }
    }

    // p * ||beta||_D, increasing in p.
    double scaled_dnorm(double p, double q) const {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (d(i) > 0.0 && g(i) != 0.0) {
                const double v = p * g(i) / (h(i) + p * d(i) + q);
                sum += d(i) * v * v;
            }
        }
        return std::sqrt(sum);
    }

    double saturated_dnorm() const {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (d(i) > 0.0) {
                sum += g(i) * g(i) / d(i);
            }
        }
        return std::sqrt(sum);
    }

    double norm(double p, double q) const {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (g(i) == 0.0 || (p == kInf && d(i) > 0.0)) {
                continue;
            }
            const double pd = d(i) > 0.0 ? p * d(i) : 0.0;
            const double v = g(i) / (h(i) + pd + q);
            sum += v * v;
        }
        return std::sqrt(sum);
    }
};

}  // namespace

double trust_region_residual(const VectorRef& z, const VectorRef& spectrum, double a) {
    check_sizes(z, spectrum, "trust_region_residual: size mismatch");
    if (a == 0.0) {
        return z.norm();
    }
    double fixed = 0.0;     // mass in directions the scaled ball cannot reach
    double free_u2 = 0.0;   // ||u||^2 of the unconstrained solution
    double weighted = 0.0;  // ||sqrt(D) z||
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (spectrum(i) > 0.0) {
            free_u2 += z(i) * z(i) / (a * a * spectrum(i));
            weighted += spectrum(i) * z(i) * z(i);
        } else {
            fixed += z(i) * z(i);
        }
    }
    if (free_u2 <= 1.0) {
        return std::sqrt(fixed);
    }
    weighted = std::sqrt(weighted);
    // ||u(nu)||^2 = sum a^2 d z^2 / (a^2 d + nu)^2 decreases from free_u2 > 1 to 0.
    auto excess = [&](double nu) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            if (spectrum(i) > 0.0) {
                const double denom = a * a * spectrum(i) + nu;
                sum += a * a * spectrum(i) * z(i) * z(i) / (denom * denom);
            }
        }
        return sum - 1.0;
    };
    const double hi = a * weighted;
    const double nu = bracketed_root(excess, 0.0, hi, free_u2 - 1.0, excess(hi));
    double residual = fixed;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (spectrum(i) > 0.0) {
            const double shrink = nu / (a * a * spectrum(i) + nu);
            residual += z(i) * z(i) * shrink * shrink;
        }
    }
    return std::sqrt(residual);
}

bool zero_block_test(const VectorRef& z, const VectorRef& spectrum, double a, double b) {
    if (a < 0.0 || b < 0.0) {
        throw Error(ErrorCode::invalid_parameter, "penalty weights must be nonnegative");
    }
    return trust_region_residual(z, spectrum, a) <= b + kZeroTieTol * z.norm();
}

Eigen::VectorXd solve_block(const VectorRef& h, const VectorRef& g, const VectorRef& d, double a, double b) {
    check_sizes(h, g, "solve_block: curvature/linear size mismatch");
    check_sizes(d, g, "solve_block: spectrum/linear size mismatch");
    if (a < 0.0 || b < 0.0) {
        throw Error(ErrorCode::invalid_parameter, "penalty weights must be nonnegative");
    }
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (h(i) < 0.0 || d(i) < 0.0) {
            throw Error(ErrorCode::invalid_parameter, "curvature and spectrum must be nonnegative");
        }
        if (g(i) != 0.0 && h(i) == 0.0) {
            throw Error(ErrorCode::invalid_parameter, "flat direction with nonzero linear term");
        }
    }
    if (zero_block_test(g, d, a, b)) {
        return Eigen::VectorXd::Zero(g.size());
    }

    const Parametrized param{h, g, d};

    // Inner root: p with p ||beta(p, q)||_D = a.
    const double saturation = param.saturated_dnorm();
    auto p_of_q = [&](double q) {
        if (a == 0.0) {
            return 0.0;
        }
        if (saturation <= a) {
            return kInf;
        }
        auto f = [&](double p) { return param.scaled_dnorm(p, q) - a; };
        double hi = 1.0;
        double f_hi = f(hi);
        while (f_hi < 0.0) {
            hi *= 2.0;
            f_hi = f(hi);
            if (!std::isfinite(hi)) {
                return kInf;
            }
        }
        return bracketed_root(f, 0.0, hi, -a, f_hi);
    };
    auto norm_of_q = [&](double q) { return param.norm(p_of_q(q), q); };

    // Without the ball: q ||beta(q)|| = b, where q -> q ||beta(q)|| is nondecreasing.
    double q_free = 0.0;
    if (b > 0.0) {
        auto f = [&](double q) { return q * norm_of_q(q) - b; };
        double hi = b;
        double f_hi = f(hi);
        while (f_hi < 0.0) {
            hi *= 2.0;
            f_hi = f(hi);
            if (!std::isfinite(hi)) {
                return Eigen::VectorXd::Zero(g.size());
            }
        }
        q_free = bracketed_root(f, 0.0, hi, -b, f_hi);
    }

    double q = q_free;
    if (norm_of_q(q_free) > 1.0) {
        // Ball active: ||beta(q)|| = 1, with ||beta(q)|| nonincreasing in q.
        auto f = [&](double qq) { return norm_of_q(qq) - 1.0; };
        double lo = q_free;
        double hi = std::max(2.0 * q_free, 1.0);
        double f_hi = f(hi);
        while (f_hi > 0.0) {
            lo = hi;
            hi *= 2.0;
            f_hi = f(hi);
        }
        q = bracketed_root(f, lo, hi, f(lo), f_hi);
    }

    Eigen::VectorXd beta;
    param.fill(p_of_q(q), q, beta);
    const double norm = beta.norm();
    if (norm > 1.0) {
        beta /= norm;
    }
    return beta;
}

Eigen::VectorXd block_prox(const VectorRef& z, const VectorRef& spectrum, double a, double b) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(z.size());
    return solve_block(ones, z, spectrum, a, b);
}

double block_objective(const VectorRef& beta, const VectorRef& h, const VectorRef& g, const VectorRef& d, double a,
                       double b) {
    const double quad = 0.5 * beta.dot(h.cwiseProduct(beta)) - g.dot(beta);
    const double dnorm = std::sqrt(beta.dot(d.cwiseProduct(beta)));
    return quad + a * dnorm + b * beta.norm();
}

double block_stationarity(const VectorRef& beta, const VectorRef& h, const VectorRef& g, const VectorRef& d, double a,
                          double b) {
    check_sizes(beta, g, "block_stationarity: size mismatch");
    const double r = beta.norm();
    if (r == 0.0) {
        return std::max(0.0, trust_region_residual(g, d, a) - b);
    }
    Eigen::VectorXd w = h.cwiseProduct(beta) - g + (b / r) * beta;
    const double t = std::sqrt(beta.dot(d.cwiseProduct(beta)));
    if (t > 0.0) {
        w += (a / t) * d.cwiseProduct(beta);
    }
    if (r >= 1.0 - kBoundaryTol) {
        // Normal cone of the ball: add theta * beta with theta >= 0.
        const double along = w.dot(beta);
        if (along < 0.0) {
            w -= (along / (r * r)) * beta;
        }
    }
    if (t == 0.0 && a > 0.0) {
        // beta lives on zero-spectrum directions, so the seminorm term adds
        // any a sqrt(D) u with ||u|| <= 1 on the other coordinates.
        const Eigen::VectorXd neg = -w;
        return trust_region_residual(neg, d, a);
    }
    return w.norm();
}

}  // namespace spamkern
