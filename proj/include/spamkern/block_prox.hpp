#pragma once

#include <Eigen/Dense>

namespace spamkern {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// min over ||u|| <= 1 of || z - a diag(sqrt(spectrum)) u ||, via a scalar root
/// on the trust-region multiplier.
double trust_region_residual(const VectorRef& z, const VectorRef& spectrum, double a);

/// True iff beta = 0 minimizes the block problem with linear term z, i.e.
/// z lies in a * sqrt(D) * Ball + b * Ball (ties within 1e-12 * ||z|| count as zero).
bool zero_block_test(const VectorRef& z, const VectorRef& spectrum, double a, double b);

/// Exact minimizer over ||beta|| <= 1 of
///
///   1/2 beta^T diag(curvature) beta - linear^T beta + a sqrt(beta^T diag(spectrum) beta) + b ||beta||.
///
/// Stationary points have the form beta_i = linear_i / (curvature_i + p spectrum_i + q)
/// with p = a / ||beta||_D and q = b / ||beta|| + theta (theta the ball multiplier),
/// so the solve reduces to two nested monotone scalar roots in p and q.
///
/// Requires curvature_i > 0 wherever linear_i != 0.
Eigen::VectorXd solve_block(const VectorRef& curvature, const VectorRef& linear, const VectorRef& spectrum, double a,
                            double b);

/// argmin over ||beta|| <= 1 of 1/2 ||beta - z||^2 + a sqrt(beta^T D beta) + b ||beta||.
Eigen::VectorXd block_prox(const VectorRef& z, const VectorRef& spectrum, double a, double b);

/// Distance from 0 to the subdifferential of the solve_block objective
/// (including the normal cone of the unit ball) at beta.
double block_stationarity(const VectorRef& beta, const VectorRef& curvature, const VectorRef& linear,
                          const VectorRef& spectrum, double a, double b);

/// Value of the solve_block objective at beta (no constraint check).
double block_objective(const VectorRef& beta, const VectorRef& curvature, const VectorRef& linear,
                       const VectorRef& spectrum, double a, double b);

}  // namespace spamkern
