#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spamkern {

/// Univariate Mercer kernel on [0,1] with respect to the uniform measure:
///
///   K(x, y) = sum_{k=1}^{M} mu_k phi_k(x) phi_k(y),   phi_k(x) = sqrt(2) cos(2 pi k x).
///
/// The cosine family is orthonormal in L2[0,1], every member integrates to zero
/// and |phi_k| <= sqrt(2), so population norms and Hilbert norms are exact
/// functions of the basis coefficients.
class SpectralKernel {
public:
    /// Throws invalid_parameter unless the sequence is nonempty, nonnegative and nonincreasing.
    explicit SpectralKernel(std::vector<double> eigenvalues);

    std::span<const double> eigenvalues() const { return eigenvalues_; }
    double eigenvalue(std::size_t k) const { return eigenvalues_[k - 1]; }
    std::size_t truncation() const { return eigenvalues_.size(); }
    std::size_t rank() const;  // number of strictly positive eigenvalues

    /// phi_k(x) with k starting at 1.
    static double basis(std::size_t k, double x);
    static double basis_sup_bound();

    /// n x M matrix with entries phi_k(x_i).
    Eigen::MatrixXd features(const Eigen::Ref<const Eigen::VectorXd>& points) const;

    /// n x r matrix with entries sqrt(mu_k) phi_k(x_i) over the positive eigenvalues,
    /// so that the Gram matrix equals F F^T.
    Eigen::MatrixXd scaled_features(const Eigen::Ref<const Eigen::VectorXd>& points) const;

private:
    std::vector<double> eigenvalues_;
};

/// mu_k = k^(-2 alpha), k = 1..m_trunc.
SpectralKernel make_sobolev_kernel(double alpha, std::size_t m_trunc = 1000);

/// mu_k = 1 for k = 1..m.
SpectralKernel make_finite_rank_kernel(std::size_t m);

/// Mercer sum. Throws domain_error outside [0,1].
double eval_kernel(const SpectralKernel& kernel, double x, double y);

/// Symmetric eigendecomposition U diag(spectrum) U^T of a Gram matrix.
///
/// `matrix` is only populated by gram_matrix(); the feature route leaves it
/// empty and keeps only the retained directions.
struct GramFactor {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd basis;     // n x r, orthonormal columns
    Eigen::VectorXd spectrum;  // r entries, nonincreasing, clamped at zero

    Eigen::Index size() const { return basis.rows(); }
    Eigen::MatrixXd reconstruct() const;
};

/// Builds the n x n Gram matrix entry by entry through eval_kernel and factors it.
GramFactor gram_matrix(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& column);

/// Same decomposition computed from the feature matrix without forming the
/// n x n Gram matrix when the kernel rank is below n. Directions outside the
/// kernel's range have exactly zero eigenvalue and are omitted.
GramFactor feature_gram_factor(const SpectralKernel& kernel,
                               const Eigen::Ref<const Eigen::VectorXd>& column);

/// sum_k a_k^2 / mu_k. Throws infeasible_coefficient if a_k != 0 where mu_k = 0.
double hilbert_norm_sq(std::span<const double> coeffs, const SpectralKernel& kernel);

/// max over a 10,001-point grid of sqrt(K(x,x)).
double kernel_sup_bound(const SpectralKernel& kernel);

/// Quadrature diagnostics for the basis (composite Simpson, 10,001 nodes).
struct BasisCheck {
    double max_orthonormality_error = 0.0;
    double max_mean_error = 0.0;
    double max_abs_value = 0.0;
};

BasisCheck check_basis(const SpectralKernel& kernel, std::size_t max_index);

}  // namespace spamkern
