#include "spamkern/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "spamkern/error.hpp"

namespace spamkern {

namespace {

enum Stream : std::uint64_t { kSupportStream = 1, kCoeffStream = 2, kDesignStream = 3, kNoiseStream = 4 };

void require_fit_matches(const AdditiveFit& fit, const Dataset& dataset) {
    if (fit.dims() != dataset.dims() || fit.samples() != dataset.samples()) {
        throw Error(ErrorCode::dimension_mismatch, "fit was not produced on this dataset");
    }
}

}  // namespace

Eigen::MatrixXd Dataset::truth_coefficient_matrix() const {
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(truth_coeffs.rows(), design.cols());
    for (std::size_t l = 0; l < support.size(); ++l) {
        full.col(static_cast<Eigen::Index>(support[l])) = truth_coeffs.col(static_cast<Eigen::Index>(l));
    }
    return full;
}

Eigen::VectorXd random_unit_ball_function(const SpectralKernel& kernel, double radius, Rng& rng) {
    if (!(radius > 0.0 && radius <= 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "radius must lie in (0, 1]");
    }
    const auto mu = kernel.eigenvalues();
    const auto m = static_cast<Eigen::Index>(mu.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::VectorXd a(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            a(k) = mu[static_cast<std::size_t>(k)] * normal(rng);
        }
        const double norm_sq = hilbert_norm_sq(std::span<const double>(a.data(), a.size()), kernel);
        if (norm_sq > 0.0) {
            return a * (radius / std::sqrt(norm_sq));
        }
    }
    throw Error(ErrorCode::degenerate_draw, "all Gaussian weights were zero");
}

Dataset generate(const SyntheticSpec& spec) {
    if (spec.s < 1 || spec.s > spec.d || spec.n < 1) {
        throw Error(ErrorCode::invalid_parameter, "synthetic spec needs 1 <= s <= d and n >= 1");
    }
    if (!(spec.signal_radius > 0.0 && spec.signal_radius <= 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "signal radius must lie in (0, 1]");
    }
    if (!(spec.noise_std >= 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "noise standard deviation must be nonnegative");
    }
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto d = static_cast<Eigen::Index>(spec.d);

    Dataset out;
    out.mu = spec.mu;
    out.noise_std = spec.noise_std;

    // Partial Fisher-Yates for a uniform s-subset.
    {
        Rng rng = make_stream(spec.seed, {kSupportStream});
        std::vector<std::size_t> idx(spec.d);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < spec.s; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, spec.d - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        out.support.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.s));
        std::sort(out.support.begin(), out.support.end());
    }
    {
        Rng rng = make_stream(spec.seed, {kCoeffStream});
        out.truth_coeffs.resize(static_cast<Eigen::Index>(spec.kernel.truncation()), static_cast<Eigen::Index>(spec.s));
        for (std::size_t l = 0; l < spec.s; ++l) {
            out.truth_coeffs.col(static_cast<Eigen::Index>(l)) =
                random_unit_ball_function(spec.kernel, spec.signal_radius, rng);
        }
    }
    {
        Rng rng = make_stream(spec.seed, {kDesignStream});
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        out.design.resize(n, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                out.design(i, j) = unif(rng);
            }
        }
    }
    {
        Rng rng = make_stream(spec.seed, {kNoiseStream});
        std::normal_distribution<double> normal(0.0, 1.0);
        out.noise.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.noise(i) = spec.noise_std * normal(rng);
        }
    }
    out.responses = eval_additive(out.truth_coefficient_matrix(), spec.kernel, out.design);
    out.responses.array() += spec.mu;
    out.responses += out.noise;
    return out;
}

Eigen::VectorXd eval_additive(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, const SpectralKernel& kernel,
                              const Eigen::Ref<const Eigen::MatrixXd>& points) {
    if (coeffs.cols() != points.cols() || coeffs.rows() != static_cast<Eigen::Index>(kernel.truncation())) {
        throw Error(ErrorCode::dimension_mismatch, "coefficient matrix does not match points or kernel");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(points.rows());
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        if (coeffs.col(j).squaredNorm() == 0.0) {
            continue;
        }
        out.noalias() += kernel.features(points.col(j)) * coeffs.col(j);
    }
    return out;
}

double l2p_error_exact(const AdditiveFit& fit, const Dataset& dataset, const SpectralKernel& kernel,
                       const Eigen::Ref<const Eigen::MatrixXd>& train_design) {
    require_fit_matches(fit, dataset);
    const Eigen::MatrixXd fitted = population_coefficients(fit, kernel, train_design);
    const Eigen::MatrixXd truth = dataset.truth_coefficient_matrix();
    if (truth.rows() != fitted.rows()) {
        throw Error(ErrorCode::dimension_mismatch, "dataset was generated with a different kernel truncation");
    }
    return (fitted - truth).squaredNorm();
}

double l2pn_error(const AdditiveFit& fit, const Dataset& dataset, const SpectralKernel& kernel) {
    require_fit_matches(fit, dataset);
    const Eigen::MatrixXd diff = population_coefficients(fit, kernel, dataset.design) - dataset.truth_coefficient_matrix();
    return eval_additive(diff, kernel, dataset.design).squaredNorm() / static_cast<double>(dataset.samples());
}

SupportRecovery support_recovery(const AdditiveFit& fit, const Dataset& dataset, double threshold) {
    if (!(threshold >= 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "threshold must be nonnegative");
    }
    if (fit.dims() != dataset.dims()) {
        throw Error(ErrorCode::dimension_mismatch, "fit was not produced on this dataset");
    }
    std::size_t predicted = 0;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < fit.dims(); ++j) {
        if (fit.empirical_norm(j) > threshold) {
            ++predicted;
            if (std::binary_search(dataset.support.begin(), dataset.support.end(), j)) {
                ++hits;
            }
        }
    }
    SupportRecovery out;
    out.precision = predicted == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(predicted);
    out.recall = dataset.support.empty() ? 1.0
                                         : static_cast<double>(hits) / static_cast<double>(dataset.support.size());
    return out;
}

}  // namespace spamkern
