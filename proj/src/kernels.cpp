#include "spamkern/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spamkern/error.hpp"

namespace spamkern {

namespace {

constexpr std::size_t kGridPoints = 10001;

void require_unit_interval(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::domain_error, "kernel argument " + std::to_string(x) + " outside [0,1]");
    }
}

// Eigen returns ascending eigenvalues; we keep them nonincreasing and clamp
// roundoff negatives to zero.
void to_descending(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors, GramFactor& out) {
    const Eigen::Index r = values.size();
    out.spectrum.resize(r);
    out.basis.resize(vectors.rows(), r);
    for (Eigen::Index i = 0; i < r; ++i) {
        out.spectrum(i) = std::max(0.0, values(r - 1 - i));
        out.basis.col(i) = vectors.col(r - 1 - i);
    }
}

}  // namespace

SpectralKernel::SpectralKernel(std::vector<double> eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
    if (eigenvalues_.empty()) {
        throw Error(ErrorCode::invalid_parameter, "kernel needs at least one eigenvalue");
    }
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
        if (!(eigenvalues_[k] >= 0.0) || !std::isfinite(eigenvalues_[k])) {
            throw Error(ErrorCode::invalid_parameter, "eigenvalues must be finite and nonnegative");
        }
        if (k > 0 && eigenvalues_[k] > eigenvalues_[k - 1]) {
            throw Error(ErrorCode::invalid_parameter, "eigenvalues must be nonincreasing");
        }
    }
}

std::size_t SpectralKernel::rank() const {
    return static_cast<std::size_t>(
        std::count_if(eigenvalues_.begin(), eigenvalues_.end(), [](double mu) { return mu > 0.0; }));
}

double SpectralKernel::basis(std::size_t k, double x) {
    return std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * x);
}

double SpectralKernel::basis_sup_bound() { return std::numbers::sqrt2; }

Eigen::MatrixXd SpectralKernel::features(const Eigen::Ref<const Eigen::VectorXd>& points) const {
    const Eigen::Index n = points.size();
    const auto m = static_cast<Eigen::Index>(truncation());
    Eigen::MatrixXd phi(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            phi(i, k) = basis(static_cast<std::size_t>(k + 1), points(i));
        }
    }
    return phi;
}

Eigen::MatrixXd SpectralKernel::scaled_features(const Eigen::Ref<const Eigen::VectorXd>& points) const {
    const Eigen::Index n = points.size();
    const auto r = static_cast<Eigen::Index>(rank());
    Eigen::MatrixXd phi(n, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        const double scale = std::sqrt(eigenvalues_[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < n; ++i) {
            phi(i, k) = scale * basis(static_cast<std::size_t>(k + 1), points(i));
        }
    }
    return phi;
}

SpectralKernel make_sobolev_kernel(double alpha, std::size_t m_trunc) {
    if (!(alpha > 0.5)) {
        throw Error(ErrorCode::invalid_parameter, "sobolev smoothness must exceed 1/2");
    }
    if (m_trunc == 0) {
        throw Error(ErrorCode::invalid_parameter, "truncation must be positive");
    }
    std::vector<double> mu(m_trunc);
    for (std::size_t k = 1; k <= m_trunc; ++k) {
        mu[k - 1] = std::pow(static_cast<double>(k), -2.0 * alpha);
    }
    return SpectralKernel(std::move(mu));
}

SpectralKernel make_finite_rank_kernel(std::size_t m) {
    if (m == 0) {
        throw Error(ErrorCode::invalid_parameter, "finite-rank kernel needs m >= 1");
    }
    return SpectralKernel(std::vector<double>(m, 1.0));
}

double eval_kernel(const SpectralKernel& kernel, double x, double y) {
    require_unit_interval(x);
    require_unit_interval(y);
    const auto mu = kernel.eigenvalues();
    double sum = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
        if (mu[k] == 0.0) {
            break;
        }
        sum += mu[k] * (SpectralKernel::basis(k + 1, x) * SpectralKernel::basis(k + 1, y));
    }
    return sum;
}

Eigen::MatrixXd GramFactor::reconstruct() const {
    return basis * spectrum.asDiagonal() * basis.transpose();
}

GramFactor gram_matrix(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& column) {
    const Eigen::Index n = column.size();
    if (n < 1) {
        throw Error(ErrorCode::invalid_parameter, "gram matrix needs at least one point");
    }
    GramFactor out;
    out.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index l = i; l < n; ++l) {
            const double value = eval_kernel(kernel, column(i), column(l));
            out.matrix(i, l) = value;
            out.matrix(l, i) = value;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.matrix);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::decomposition_failure, "symmetric eigensolver did not converge");
    }
    to_descending(solver.eigenvalues(), solver.eigenvectors(), out);
    return out;
}

GramFactor feature_gram_factor(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& column) {
    const Eigen::Index n = column.size();
    if (n < 1) {
        throw Error(ErrorCode::invalid_parameter, "gram matrix needs at least one point");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        require_unit_interval(column(i));
    }
    const Eigen::MatrixXd features = kernel.scaled_features(column);
    const Eigen::Index r = features.cols();
    GramFactor out;
    if (r >= n) {
        const Eigen::MatrixXd gram = features * features.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorCode::decomposition_failure, "symmetric eigensolver did not converge");
        }
        to_descending(solver.eigenvalues(), solver.eigenvectors(), out);
        return out;
    }
    // F = Q R with Q (n x r) orthonormal, so F F^T = Q (R R^T) Q^T and only an
    // r x r eigenproblem remains.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(features);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
    const Eigen::MatrixXd upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(upper * upper.transpose());
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::decomposition_failure, "symmetric eigensolver did not converge");
    }
    to_descending(solver.eigenvalues(), solver.eigenvectors(), out);
    out.basis = q * out.basis;
    return out;
}

double hilbert_norm_sq(std::span<const double> coeffs, const SpectralKernel& kernel) {
    const auto mu = kernel.eigenvalues();
    if (coeffs.size() > mu.size()) {
        throw Error(ErrorCode::dimension_mismatch, "more coefficients than retained eigenpairs");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) {
            continue;
        }
        if (mu[k] == 0.0) {
            throw Error(ErrorCode::infeasible_coefficient,
                        "nonzero coefficient on a zero eigenvalue (index " + std::to_string(k + 1) + ")");
        }
        sum += coeffs[k] * coeffs[k] / mu[k];
    }
    return sum;
}

double kernel_sup_bound(const SpectralKernel& kernel) {
    double best = 0.0;
    for (std::size_t i = 0; i < kGridPoints; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(kGridPoints - 1);
        best = std::max(best, eval_kernel(kernel, x, x));
    }
    return std::sqrt(best);
}

BasisCheck check_basis(const SpectralKernel& kernel, std::size_t max_index) {
    max_index = std::min(max_index, kernel.truncation());
    const std::size_t nodes = kGridPoints;
    const double h = 1.0 / static_cast<double>(nodes - 1);
    std::vector<double> weights(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        weights[i] = w * h / 3.0;
    }
    Eigen::MatrixXd values(nodes, static_cast<Eigen::Index>(max_index));
    for (std::size_t k = 0; k < max_index; ++k) {
        for (std::size_t i = 0; i < nodes; ++i) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                SpectralKernel::basis(k + 1, static_cast<double>(i) * h);
        }
    }
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(nodes));
    const Eigen::MatrixXd gram = values.transpose() * w.asDiagonal() * values;
    const Eigen::VectorXd means = values.transpose() * w;

    BasisCheck check;
    const auto m = static_cast<Eigen::Index>(max_index);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            const double target = j == k ? 1.0 : 0.0;
            check.max_orthonormality_error = std::max(check.max_orthonormality_error, std::abs(gram(j, k) - target));
        }
    }
    check.max_mean_error = m > 0 ? means.cwiseAbs().maxCoeff() : 0.0;
    check.max_abs_value = m > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
    return check;
}

}  // namespace spamkern
