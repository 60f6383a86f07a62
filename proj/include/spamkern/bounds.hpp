#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spamkern/kernels.hpp"
#include "spamkern/rng.hpp"

namespace spamkern {

using Codeword = std::vector<std::uint32_t>;

/// Codewords over {0, ..., N}^d with exactly s nonzero symbols and pairwise
/// Hamming distance at least ceil(s/2).
struct PackingSet {
    std::size_t d = 0;
    std::size_t s = 0;
    std::size_t alphabet_size = 0;  // N
    std::vector<Codeword> codewords;
    std::size_t min_distance = 0;  // certified by an exhaustive pairwise check
};

std::size_t hamming_distance(const Codeword& u, const Codeword& v);

/// Smallest pairwise Hamming distance (d + 1 when there are fewer than two codewords).
std::size_t min_pairwise_distance(const std::vector<Codeword>& codewords, std::size_t d);

/// N* = 1/2 C(d,s)/C(d,s/2) N^s/(N+1)^{s/2}, in log-domain. Requires s even.
double n_star(std::size_t d, std::size_t s, std::size_t alphabet);

inline constexpr std::size_t kPackingCandidateBudget = 1000000;

/// Randomized greedy construction: scan random members of the codeword set and
/// keep each one at distance >= ceil(s/2) from everything kept so far. Throws
/// packing_shortfall when fewer than min(max_size, floor(N*)) codewords are
/// found within the candidate budget.
PackingSet greedy_packing(std::size_t d, std::size_t s, std::size_t alphabet, std::size_t max_size, Rng& rng);

/// Maps each codeword u to the additive function sum_j f^{u_j}, where symbol
/// v >= 1 is (scale / sqrt(s)) phi_v and symbol 0 is the zero function.
/// Returns one M x d coefficient matrix per codeword.
std::vector<Eigen::MatrixXd> packing_to_functions(const PackingSet& pack, const SpectralKernel& kernel, double scale);

/// max(0, 1 - (32 n delta^2 + log 2) / log M).
double fano_bound(std::size_t n, double delta, double log_m);

/// Solution of  max c^T beta  s.t. ||beta|| <= 1,  beta^T D beta / n <= t^2.
struct LocalizedSup {
    double value = 0.0;  // c^T beta at the returned feasible point
    double dual = 0.0;   // dual objective at the multiplier found
    Eigen::VectorXd beta;
    double ball_residual = 0.0;      // max(0, ||beta|| - 1)
    double seminorm_residual = 0.0;  // max(0, sqrt(beta^T D beta / n) - t)
};

/// Minimizes the dual sqrt(c^T ((1-w) I + w D/(n t^2))^{-1} c) over w in [0,1]
/// by golden-section search and recovers a feasible primal point from it.
LocalizedSup localized_sup(const Eigen::Ref<const Eigen::VectorXd>& c, const Eigen::Ref<const Eigen::VectorXd>& spectrum,
                           std::size_t n, double t);

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

/// Monte Carlo estimate of E_w sup { (1/n) sum_i w_i g(x_i) : ||g||_H <= 1, ||g||_n <= t }.
McEstimate gaussian_complexity_mc(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& column,
                                  double t, std::size_t reps, Rng& rng);

/// Fraction of trials with 1/2 ||g||_2 <= ||g||_n <= 3/2 ||g||_2 for random
/// unit-ball functions (scaled up to ||g||_2 >= t) on fresh uniform samples.
double sandwich_check(const SpectralKernel& kernel, std::size_t n, std::size_t trials, double t, Rng& rng);

}  // namespace spamkern
