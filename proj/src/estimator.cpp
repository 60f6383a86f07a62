#include "spamkern/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spamkern/block_prox.hpp"
#include "spamkern/error.hpp"

namespace spamkern {

namespace {

// Gram eigenvalues below this fraction of the largest are treated as zero.
constexpr double kRetainRelTol = 1e-13;

struct Block {
    Eigen::MatrixXd basis;  // n x r
    Eigen::VectorXd spectrum;
    Eigen::VectorXd sqrt_spectrum;
    Eigen::VectorXd curvature;  // spectrum / n
};

std::vector<Block> make_blocks(const std::vector<GramFactor>& factors, Eigen::Index n) {
    std::vector<Block> blocks;
    blocks.reserve(factors.size());
    for (const auto& f : factors) {
        if (f.basis.rows() != n) {
            throw Error(ErrorCode::dimension_mismatch, "gram factor size does not match number of responses");
        }
        const double top = f.spectrum.size() > 0 ? f.spectrum.maxCoeff() : 0.0;
        Eigen::Index r = 0;
        while (r < f.spectrum.size() && f.spectrum(r) > kRetainRelTol * top) {
            ++r;
        }
        Block b;
        b.basis = f.basis.leftCols(r);
        b.spectrum = f.spectrum.head(r);
        b.sqrt_spectrum = b.spectrum.cwiseSqrt();
        b.curvature = b.spectrum / static_cast<double>(n);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

void require_same_rows(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw Error(ErrorCode::dimension_mismatch, what);
    }
}

Eigen::VectorXd centered(const Eigen::Ref<const Eigen::VectorXd>& y, double& mean) {
    mean = y.mean();
    return y.array() - mean;
}

Eigen::VectorXd residual_of(const std::vector<Block>& blocks, const std::vector<Eigen::VectorXd>& beta,
                            const Eigen::VectorXd& yc) {
    Eigen::VectorXd r = yc;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (beta[j].size() > 0 && beta[j].squaredNorm() > 0.0) {
            r.noalias() -= blocks[j].basis * blocks[j].sqrt_spectrum.cwiseProduct(beta[j]);
        }
    }
    return r;
}

double penalty_of(const Block& block, const Eigen::VectorXd& beta, double a, double b) {
    if (beta.size() == 0) {
        return 0.0;
    }
    return a * std::sqrt(beta.dot(block.spectrum.cwiseProduct(beta))) + b * beta.norm();
}

// Linear term of block j's subproblem given the full residual r.
Eigen::VectorXd block_linear(const Block& block, const Eigen::VectorXd& beta, const Eigen::VectorXd& r, double n) {
    const Eigen::VectorXd projected = block.basis.transpose() * r;
    return block.sqrt_spectrum.cwiseProduct(projected + block.sqrt_spectrum.cwiseProduct(beta)) / n;
}

double full_kkt(const std::vector<Block>& blocks, const std::vector<Eigen::VectorXd>& beta, const Eigen::VectorXd& r,
                double n, double a, double b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (blocks[j].spectrum.size() == 0) {
            continue;
        }
        const Eigen::VectorXd g = block_linear(blocks[j], beta[j], r, n);
        worst = std::max(worst, block_stationarity(beta[j], blocks[j].curvature, g, blocks[j].spectrum, a, b));
    }
    return worst;
}

}  // namespace

double AdditiveFit::empirical_norm(std::size_t j) const {
    const auto& beta = block_weights.at(j);
    if (beta.size() == 0) {
        return 0.0;
    }
    return std::sqrt(beta.dot(block_spectra.at(j).cwiseProduct(beta)) / static_cast<double>(samples()));
}

double AdditiveFit::hilbert_norm(std::size_t j) const { return block_weights.at(j).norm(); }

std::vector<GramFactor> factor_design(const SpectralKernel& kernel, const Eigen::Ref<const Eigen::MatrixXd>& design) {
    std::vector<GramFactor> factors;
    factors.reserve(static_cast<std::size_t>(design.cols()));
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
        factors.push_back(feature_gram_factor(kernel, design.col(j)));
    }
    return factors;
}

AdditiveFit fit(const Eigen::Ref<const Eigen::MatrixXd>& design, const Eigen::Ref<const Eigen::VectorXd>& responses,
                const SpectralKernel& kernel, const RegParams& params, const SolverOptions& opts) {
    require_same_rows(design.rows(), responses.size(), "design rows and responses differ");
    return fit_factored(factor_design(kernel, design), responses, params, opts);
}

AdditiveFit fit_factored(const std::vector<GramFactor>& factors, const Eigen::Ref<const Eigen::VectorXd>& responses,
                         const RegParams& params, const SolverOptions& opts) {
    const Eigen::Index n_samples = responses.size();
    if (n_samples < 2 || factors.empty()) {
        throw Error(ErrorCode::invalid_parameter, "fit needs n >= 2 and d >= 1");
    }
    if (!(params.lambda_n >= 0.0) || !(params.rho_n >= 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "penalty weights must be nonnegative");
    }
    if (opts.max_sweeps == 0 || !(opts.kkt_tol > 0.0) || !(opts.objective_tol > 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "solver options must be positive");
    }
    const double n = static_cast<double>(n_samples);
    const std::vector<Block> blocks = make_blocks(factors, n_samples);
    const std::size_t d = blocks.size();
    const double a = params.lambda_n / std::sqrt(n);
    const double b = params.rho_n;

    AdditiveFit out;
    const Eigen::VectorXd yc = centered(responses, out.intercept);
    out.lambda = params.lambda_n;
    out.rho = params.rho_n;

    std::vector<Eigen::VectorXd> beta(d);
    for (std::size_t j = 0; j < d; ++j) {
        beta[j] = Eigen::VectorXd::Zero(blocks[j].spectrum.size());
    }
    Eigen::VectorXd r = yc;
    double previous = 0.5 * r.squaredNorm() / n;
    out.objective_trace.push_back(previous);

    bool converged = false;
    double kkt = 0.0;
    std::size_t sweep = 0;
    while (sweep < opts.max_sweeps) {
        ++sweep;
        double proxy = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const Block& block = blocks[j];
            if (block.spectrum.size() == 0) {
                continue;
            }
            const Eigen::VectorXd g = block_linear(block, beta[j], r, n);
            proxy = std::max(proxy, block_stationarity(beta[j], block.curvature, g, block.spectrum, a, b));
            Eigen::VectorXd updated = solve_block(block.curvature, g, block.spectrum, a, b);
            const Eigen::VectorXd step = updated - beta[j];
            if (step.squaredNorm() > 0.0) {
                r.noalias() -= block.basis * block.sqrt_spectrum.cwiseProduct(step);
                beta[j] = std::move(updated);
            }
            out.max_block_norm = std::max(out.max_block_norm, beta[j].norm());
        }

        double current = 0.5 * r.squaredNorm() / n;
        for (std::size_t j = 0; j < d; ++j) {
            current += penalty_of(blocks[j], beta[j], a, b);
        }
        out.max_objective_increase = std::max(out.max_objective_increase, current - previous);
        out.objective_trace.push_back(current);
        const double decrease = (previous - current) / std::max(std::abs(previous), 1e-300);
        previous = current;

        if (proxy <= opts.kkt_tol || decrease <= opts.objective_tol) {
            r = residual_of(blocks, beta, yc);
            kkt = full_kkt(blocks, beta, r, n, a, b);
            if (kkt <= opts.kkt_tol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        r = residual_of(blocks, beta, yc);
        kkt = full_kkt(blocks, beta, r, n, a, b);
        if (kkt > opts.kkt_tol) {
            throw Error(ErrorCode::not_converged, "KKT residual " + std::to_string(kkt) + " after " +
                                                      std::to_string(sweep) + " sweeps");
        }
    }

    out.kkt_residual = kkt;
    out.sweeps_used = sweep;
    out.objective = 0.5 * r.squaredNorm() / n;
    out.representer_weights = Eigen::MatrixXd::Zero(n_samples, static_cast<Eigen::Index>(d));
    out.block_weights.resize(d);
    out.block_spectra.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        out.objective += penalty_of(blocks[j], beta[j], a, b);
        if (beta[j].size() > 0 && beta[j].squaredNorm() > 0.0) {
            out.active_set.push_back(j);
            out.representer_weights.col(static_cast<Eigen::Index>(j)) =
                blocks[j].basis * beta[j].cwiseQuotient(blocks[j].sqrt_spectrum);
        }
        out.block_spectra[j] = blocks[j].spectrum;
        out.block_weights[j] = std::move(beta[j]);
    }
    return out;
}

Eigen::MatrixXd population_coefficients(const AdditiveFit& fit, const SpectralKernel& kernel,
                                        const Eigen::Ref<const Eigen::MatrixXd>& train_design) {
    require_same_rows(train_design.rows(), fit.representer_weights.rows(), "training design does not match fit");
    require_same_rows(train_design.cols(), fit.representer_weights.cols(), "training design does not match fit");
    const auto m = static_cast<Eigen::Index>(kernel.truncation());
    const auto mu = kernel.eigenvalues();
    const Eigen::Map<const Eigen::VectorXd> mu_vec(mu.data(), m);
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(m, train_design.cols());
    for (std::size_t j : fit.active_set) {
        const auto col = static_cast<Eigen::Index>(j);
        const Eigen::MatrixXd phi = kernel.features(train_design.col(col));
        coeffs.col(col) = mu_vec.cwiseProduct(phi.transpose() * fit.representer_weights.col(col));
    }
    return coeffs;
}

Eigen::VectorXd predict(const AdditiveFit& fit, const SpectralKernel& kernel,
                        const Eigen::Ref<const Eigen::MatrixXd>& train_design,
                        const Eigen::Ref<const Eigen::MatrixXd>& new_points) {
    require_same_rows(new_points.cols(), train_design.cols(), "new points have the wrong number of coordinates");
    const Eigen::MatrixXd coeffs = population_coefficients(fit, kernel, train_design);
    Eigen::VectorXd out = Eigen::VectorXd::Constant(new_points.rows(), fit.intercept);
    for (std::size_t j : fit.active_set) {
        const auto col = static_cast<Eigen::Index>(j);
        out.noalias() += kernel.features(new_points.col(col)) * coeffs.col(col);
    }
    return out;
}

double objective(const AdditiveFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& design,
                 const Eigen::Ref<const Eigen::VectorXd>& responses, const SpectralKernel& kernel,
                 const RegParams& params) {
    require_same_rows(design.rows(), responses.size(), "design rows and responses differ");
    const double n = static_cast<double>(responses.size());
    const double ybar = responses.mean();
    Eigen::VectorXd fitted = predict(fit, kernel, design, design);
    fitted.array() -= fit.intercept;
    double value = 0.5 * (responses.array() - ybar - fitted.array()).matrix().squaredNorm() / n;
    for (std::size_t j = 0; j < fit.dims(); ++j) {
        value += params.lambda_n * fit.empirical_norm(j) + params.rho_n * fit.hilbert_norm(j);
    }
    return value;
}

namespace {

double kkt_with(const AdditiveFit& fit, const std::vector<GramFactor>& factors,
                const Eigen::Ref<const Eigen::VectorXd>& responses, double lambda, double rho) {
    const Eigen::Index n_samples = responses.size();
    const std::vector<Block> blocks = make_blocks(factors, n_samples);
    if (blocks.size() != fit.dims()) {
        throw Error(ErrorCode::dimension_mismatch, "fit and factors have different dimension");
    }
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (blocks[j].spectrum.size() != fit.block_weights[j].size()) {
            throw Error(ErrorCode::dimension_mismatch, "block " + std::to_string(j) + " rank differs from the fit");
        }
    }
    const double n = static_cast<double>(n_samples);
    double mean = 0.0;
    const Eigen::VectorXd yc = centered(responses, mean);
    const Eigen::VectorXd r = residual_of(blocks, fit.block_weights, yc);
    return full_kkt(blocks, fit.block_weights, r, n, lambda / std::sqrt(n), rho);
}

}  // namespace

double kkt_residual_factored(const AdditiveFit& fit, const std::vector<GramFactor>& factors,
                             const Eigen::Ref<const Eigen::VectorXd>& responses) {
    return kkt_with(fit, factors, responses, fit.lambda, fit.rho);
}

double kkt_residual(const AdditiveFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& design,
                    const Eigen::Ref<const Eigen::VectorXd>& responses, const SpectralKernel& kernel,
                    const RegParams& params) {
    require_same_rows(design.rows(), responses.size(), "design rows and responses differ");
    return kkt_with(fit, factor_design(kernel, design), responses, params.lambda_n, params.rho_n);
}

}  // namespace spamkern
