#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spamkern/estimator.hpp"
#include "spamkern/kernels.hpp"
#include "spamkern/rng.hpp"

namespace spamkern {

/// Observation model y_i = mu + sum_{j in S} f*_j(x_ij) + sigma w_i with
/// x_ij ~ Uniform[0,1] independent and w_i standard normal.
struct SyntheticSpec {
    std::size_t d = 10;
    std::size_t s = 2;
    std::size_t n = 200;
    SpectralKernel kernel;
    double mu = 0.0;
    double noise_std = 1.0;
    double signal_radius = 1.0;  // Hilbert norm of every true component
    std::uint64_t seed = 0;
};

struct Dataset {
    Eigen::MatrixXd design;            // n x d
    Eigen::VectorXd responses;         // n
    Eigen::VectorXd noise;             // sigma * w, stored so the model can be re-checked
    std::vector<std::size_t> support;  // sorted, size s
    Eigen::MatrixXd truth_coeffs;      // M x s, column l holds a_{support[l], .}
    double mu = 0.0;
    double noise_std = 1.0;

    std::size_t samples() const { return static_cast<std::size_t>(design.rows()); }
    std::size_t dims() const { return static_cast<std::size_t>(design.cols()); }
    /// M x d coefficient matrix with zero columns off the support.
    Eigen::MatrixXd truth_coefficient_matrix() const;
};

/// Coefficients a_k proportional to mu_k g_k (g_k standard normal), rescaled to
/// Hilbert norm exactly `radius`.
Eigen::VectorXd random_unit_ball_function(const SpectralKernel& kernel, double radius, Rng& rng);

Dataset generate(const SyntheticSpec& spec);

/// sum_j sum_k (a_hat_jk - a_jk)^2, the exact squared L2(P) error of the
/// additive part (intercept excluded).
double l2p_error_exact(const AdditiveFit& fit, const Dataset& dataset, const SpectralKernel& kernel,
                       const Eigen::Ref<const Eigen::MatrixXd>& train_design);

/// (1/n) sum_i (f_hat(x_i) - f*(x_i))^2 on the training design, intercept excluded.
double l2pn_error(const AdditiveFit& fit, const Dataset& dataset, const SpectralKernel& kernel);

struct SupportRecovery {
    double precision = 1.0;
    double recall = 1.0;
};

/// Predicted support {j : ||f_hat_j||_n > threshold}. An empty prediction has
/// precision 1; an empty true support has recall 1.
SupportRecovery support_recovery(const AdditiveFit& fit, const Dataset& dataset, double threshold);

/// Additive function sum_j sum_k coeffs(k, j) phi_k(points(i, j)).
Eigen::VectorXd eval_additive(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, const SpectralKernel& kernel,
                              const Eigen::Ref<const Eigen::MatrixXd>& points);

}  // namespace spamkern
