#include "spamkern/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "spamkern/error.hpp"
#include "spamkern/simulate.hpp"

namespace spamkern {

namespace {

double log_binomial(std::size_t n, std::size_t k) {
    const auto nn = static_cast<double>(n);
    const auto kk = static_cast<double>(k);
    return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
}

Codeword random_codeword(std::size_t d, std::size_t s, std::size_t alphabet, Rng& rng,
                         std::vector<std::size_t>& scratch) {
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    std::uniform_int_distribution<std::uint32_t> symbol(1, static_cast<std::uint32_t>(alphabet));
    Codeword u(d, 0);
    for (std::size_t i = 0; i < s; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, d - 1);
        std::swap(scratch[i], scratch[pick(rng)]);
        u[scratch[i]] = symbol(rng);
    }
    return u;
}

}  // namespace

std::size_t hamming_distance(const Codeword& u, const Codeword& v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::dimension_mismatch, "codewords have different lengths");
    }
    std::size_t dist = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        dist += u[j] != v[j] ? 1 : 0;
    }
    return dist;
}

std::size_t min_pairwise_distance(const std::vector<Codeword>& codewords, std::size_t d) {
    std::size_t best = d + 1;
    for (std::size_t a = 0; a < codewords.size(); ++a) {
        for (std::size_t b = a + 1; b < codewords.size(); ++b) {
            best = std::min(best, hamming_distance(codewords[a], codewords[b]));
        }
    }
    return best;
}

double n_star(std::size_t d, std::size_t s, std::size_t alphabet) {
    if (s == 0 || s % 2 != 0) {
        throw Error(ErrorCode::invalid_parameter, "n_star needs a positive even s");
    }
    if (s > d || alphabet == 0) {
        throw Error(ErrorCode::invalid_parameter, "n_star needs s <= d and N >= 1");
    }
    const auto nn = static_cast<double>(alphabet);
    const double half = static_cast<double>(s / 2);
    const double log_value = std::log(0.5) + log_binomial(d, s) - log_binomial(d, s / 2) +
                             static_cast<double>(s) * std::log(nn) - half * std::log(nn + 1.0);
    return std::exp(log_value);
}

PackingSet greedy_packing(std::size_t d, std::size_t s, std::size_t alphabet, std::size_t max_size, Rng& rng) {
    if (s == 0 || s > d || alphabet == 0 || max_size == 0) {
        throw Error(ErrorCode::invalid_parameter, "greedy_packing needs 1 <= s <= d, N >= 1, max_size >= 1");
    }
    const std::size_t required = (s + 1) / 2;
    PackingSet pack;
    pack.d = d;
    pack.s = s;
    pack.alphabet_size = alphabet;

    std::vector<std::size_t> scratch(d);
    for (std::size_t tried = 0; tried < kPackingCandidateBudget && pack.codewords.size() < max_size; ++tried) {
        Codeword u = random_codeword(d, s, alphabet, rng, scratch);
        const bool separated = std::all_of(pack.codewords.begin(), pack.codewords.end(),
                                           [&](const Codeword& v) { return hamming_distance(u, v) >= required; });
        if (separated) {
            pack.codewords.push_back(std::move(u));
        }
    }

    std::size_t target = std::min<std::size_t>(max_size, 1);
    if (s % 2 == 0) {
        const double guaranteed = std::floor(n_star(d, s, alphabet));
        target = std::max(target, static_cast<std::size_t>(std::min(guaranteed, static_cast<double>(max_size))));
    }
    if (pack.codewords.size() < target) {
        throw Error(ErrorCode::packing_shortfall, "found " + std::to_string(pack.codewords.size()) +
                                                      " codewords, guaranteed " + std::to_string(target));
    }
    pack.min_distance = min_pairwise_distance(pack.codewords, d);
    if (pack.min_distance < required) {
        throw Error(ErrorCode::packing_shortfall, "packing separation check failed");
    }
    return pack;
}

std::vector<Eigen::MatrixXd> packing_to_functions(const PackingSet& pack, const SpectralKernel& kernel, double scale) {
    if (!(scale > 0.0) || pack.s == 0) {
        throw Error(ErrorCode::invalid_parameter, "scale must be positive");
    }
    if (pack.alphabet_size > kernel.rank()) {
        throw Error(ErrorCode::insufficient_univariate_family,
                    "alphabet of " + std::to_string(pack.alphabet_size) + " symbols exceeds kernel rank " +
                        std::to_string(kernel.rank()));
    }
    const double amplitude = scale / std::sqrt(static_cast<double>(pack.s));
    for (std::size_t v = 1; v <= pack.alphabet_size; ++v) {
        if (amplitude * amplitude > kernel.eigenvalue(v)) {
            throw Error(ErrorCode::invalid_parameter, "scaled family leaves the unit Hilbert ball");
        }
    }
    const auto m = static_cast<Eigen::Index>(kernel.truncation());
    std::vector<Eigen::MatrixXd> out;
    out.reserve(pack.codewords.size());
    for (const auto& u : pack.codewords) {
        Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(pack.d));
        for (std::size_t j = 0; j < pack.d; ++j) {
            if (u[j] != 0) {
                coeffs(static_cast<Eigen::Index>(u[j]) - 1, static_cast<Eigen::Index>(j)) = amplitude;
            }
        }
        out.push_back(std::move(coeffs));
    }
    return out;
}

double fano_bound(std::size_t n, double delta, double log_m) {
    if (!(log_m > 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "log M must be positive");
    }
    const double ratio = (32.0 * static_cast<double>(n) * delta * delta + std::numbers::ln2) / log_m;
    return std::max(0.0, 1.0 - ratio);
}

LocalizedSup localized_sup(const Eigen::Ref<const Eigen::VectorXd>& c, const Eigen::Ref<const Eigen::VectorXd>& spectrum,
                           std::size_t n, double t) {
    if (c.size() != spectrum.size()) {
        throw Error(ErrorCode::dimension_mismatch, "localized_sup: size mismatch");
    }
    LocalizedSup out;
    out.beta = Eigen::VectorXd::Zero(c.size());
    if (t <= 0.0 || c.squaredNorm() == 0.0) {
        return out;
    }
    const Eigen::VectorXd e = spectrum / (static_cast<double>(n) * t * t);
    // c^T M(w)^{-1} c with M(w) = (1-w) I + w diag(e): convex in w.
    auto dual_sq = [&](double w) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            if (c(i) == 0.0) {
                continue;
            }
            const double m = (1.0 - w) + w * e(i);
            if (m <= 0.0) {
                return std::numeric_limits<double>::infinity();
            }
            sum += c(i) * c(i) / m;
        }
        return sum;
    };
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = 1.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = dual_sq(x1);
    double f2 = dual_sq(x2);
    while (hi - lo > 1e-10) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = dual_sq(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = dual_sq(x2);
        }
    }
    // Polish by bisection on the sign of the derivative.
    auto slope = [&](double w) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            const double m = (1.0 - w) + w * e(i);
            sum += c(i) * c(i) * (1.0 - e(i)) / (m * m);
        }
        return sum;
    };
    // Golden section only resolves w to about sqrt(eps) where the dual is flat.
    if (slope(lo) >= 0.0 || slope(hi) <= 0.0) {
        lo = 0.0;
        hi = 1.0;
    }
    if (slope(lo) < 0.0 && slope(hi) > 0.0) {
        for (int iter = 0; iter < 100 && hi - lo > 0.0; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            (slope(mid) < 0.0 ? lo : hi) = mid;
        }
    }
    double w = 0.5 * (lo + hi);
    double best = dual_sq(w);
    for (double edge : {0.0, 1.0}) {
        const double value = dual_sq(edge);
        if (value < best) {
            best = value;
            w = edge;
        }
    }
    out.dual = std::sqrt(best);

    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double m = (1.0 - w) + w * e(i);
        out.beta(i) = c(i) == 0.0 ? 0.0 : c(i) / m;
    }
    out.beta /= out.dual;
    // Scale onto the feasible set so both constraints hold exactly.
    const double ball = out.beta.norm();
    const double seminorm = std::sqrt(out.beta.dot(spectrum.cwiseProduct(out.beta)) / static_cast<double>(n)) / t;
    const double worst = std::max(ball, seminorm);
    if (worst > 0.0) {
        out.beta /= worst;
    }
    out.value = c.dot(out.beta);
    out.ball_residual = std::max(0.0, out.beta.norm() - 1.0);
    out.seminorm_residual =
        std::max(0.0, std::sqrt(out.beta.dot(spectrum.cwiseProduct(out.beta)) / static_cast<double>(n)) - t);
    return out;
}

McEstimate gaussian_complexity_mc(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& column,
                                  double t, std::size_t reps, Rng& rng) {
    if (reps < 30) {
        throw Error(ErrorCode::invalid_parameter, "gaussian_complexity_mc needs at least 30 replicates");
    }
    if (!(t >= 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "radius t must be nonnegative");
    }
    if (t == 0.0) {
        return {};
    }
    const GramFactor factor = feature_gram_factor(kernel, column);
    const auto n = static_cast<double>(column.size());
    const Eigen::VectorXd sqrt_spec = factor.spectrum.cwiseSqrt();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd w(column.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w(i) = normal(rng);
        }
        const Eigen::VectorXd c = sqrt_spec.cwiseProduct(factor.basis.transpose() * w) / n;
        const double value = localized_sup(c, factor.spectrum, static_cast<std::size_t>(column.size()), t).value;
        sum += value;
        sum_sq += value * value;
    }
    const auto r = static_cast<double>(reps);
    McEstimate out;
    out.mean = sum / r;
    const double var = std::max(0.0, (sum_sq - r * out.mean * out.mean) / (r - 1.0));
    out.std_err = std::sqrt(var / r);
    return out;
}

double sandwich_check(const SpectralKernel& kernel, std::size_t n, std::size_t trials, double t, Rng& rng) {
    if (!(t > 0.0) || n == 0 || trials == 0) {
        throw Error(ErrorCode::invalid_parameter, "sandwich_check needs t > 0, n >= 1, trials >= 1");
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd points(static_cast<Eigen::Index>(n));
    std::size_t hits = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd a = random_unit_ball_function(kernel, 1.0, rng);
        double l2 = a.norm();
        if (l2 < t) {
            a *= t / l2;
            l2 = t;
        }
        for (Eigen::Index i = 0; i < points.size(); ++i) {
            points(i) = unif(rng);
        }
        const double empirical = (kernel.features(points) * a).norm() / std::sqrt(static_cast<double>(n));
        if (0.5 * l2 <= empirical && empirical <= 1.5 * l2) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace spamkern
