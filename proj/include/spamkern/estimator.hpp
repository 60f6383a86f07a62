#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "spamkern/kernels.hpp"
#include "spamkern/rates.hpp"

namespace spamkern {

struct SolverOptions {
    std::size_t max_sweeps = 10000;
    double kkt_tol = 1e-6;
    double objective_tol = 1e-12;  // relative per-sweep decrease that triggers a full KKT check
};

/// Fitted doubly penalized additive model.
///
/// Block j is stored in the eigenbasis of its Gram matrix, beta_j = D_j^{1/2} U_j^T alpha_j,
/// with one entry per retained eigen-direction (directions with zero Gram
/// eigenvalue carry no weight and are not stored). Then ||f_j||_H = ||beta_j||
/// and ||f_j||_n = sqrt(beta_j^T D_j beta_j / n).
struct AdditiveFit {
    double intercept = 0.0;
    std::vector<Eigen::VectorXd> block_weights;
    std::vector<Eigen::VectorXd> block_spectra;
    Eigen::MatrixXd representer_weights;  // n x d, column j is alpha_j
    std::vector<std::size_t> active_set;
    double lambda = 0.0;
    double rho = 0.0;
    double objective = 0.0;
    double kkt_residual = 0.0;
    std::size_t sweeps_used = 0;

    // Per-sweep diagnostics.
    std::vector<double> objective_trace;  // objective after each sweep, trace[0] is the zero function
    double max_objective_increase = 0.0;  // largest sweep-to-sweep increase seen (0 when monotone)
    double max_block_norm = 0.0;          // largest ||beta_j|| seen at any sweep

    std::size_t samples() const { return static_cast<std::size_t>(representer_weights.rows()); }
    std::size_t dims() const { return block_weights.size(); }
    double empirical_norm(std::size_t j) const;  // ||f_j||_n
    double hilbert_norm(std::size_t j) const;    // ||f_j||_H
};

/// Per-coordinate Gram factorizations of a design matrix (n x d, entries in [0,1]).
std::vector<GramFactor> factor_design(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::MatrixXd>& design);

/// Block-coordinate minimization of
///
///   1/(2n) ||y - ybar - sum_j f_j(x_j)||^2 + lambda sum_j ||f_j||_n + rho sum_j ||f_j||_H
///
/// subject to ||f_j||_H <= 1, with each block minimized exactly. Throws
/// not_converged if max_sweeps is reached with the KKT residual above tolerance.
AdditiveFit fit(const Eigen::Ref<const Eigen::MatrixXd>& design, const Eigen::Ref<const Eigen::VectorXd>& responses,
                const SpectralKernel& kernel, const RegParams& params, const SolverOptions& opts = {});

/// Same as fit() with factorizations already computed by factor_design().
AdditiveFit fit_factored(const std::vector<GramFactor>& factors, const Eigen::Ref<const Eigen::VectorXd>& responses,
                         const RegParams& params, const SolverOptions& opts = {});

/// Objective recomputed from the representer weights (in-sample values through
/// the kernel) and the stored block weights.
double objective(const AdditiveFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& design,
                 const Eigen::Ref<const Eigen::VectorXd>& responses, const SpectralKernel& kernel,
                 const RegParams& params);

/// M x d matrix of basis coefficients of the fitted components,
/// a_hat_{jk} = mu_k sum_i alpha_ij phi_k(x_ij).
Eigen::MatrixXd population_coefficients(const AdditiveFit& fit, const SpectralKernel& kernel,
                                        const Eigen::Ref<const Eigen::MatrixXd>& train_design);

/// ybar + sum_j sum_i alpha_ij K(z_j, x_ij) at each row of new_points.
Eigen::VectorXd predict(const AdditiveFit& fit, const SpectralKernel& kernel,
                        const Eigen::Ref<const Eigen::MatrixXd>& train_design,
                        const Eigen::Ref<const Eigen::MatrixXd>& new_points);

/// Largest block distance from 0 to the subdifferential of the objective.
double kkt_residual(const AdditiveFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& design,
                    const Eigen::Ref<const Eigen::VectorXd>& responses, const SpectralKernel& kernel,
                    const RegParams& params);

double kkt_residual_factored(const AdditiveFit& fit, const std::vector<GramFactor>& factors,
                             const Eigen::Ref<const Eigen::VectorXd>& responses);

}  // namespace spamkern
