#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "spamkern/error.hpp"
#include "spamkern/estimator.hpp"

using namespace spamkern;

namespace {

RegParams penalties(double lambda, double rho) {
    RegParams p;
    p.lambda_n = lambda;
    p.rho_n = rho;
    return p;
}

Eigen::MatrixXd uniform_design(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            x(i, j) = unif(rng);
        }
    }
    return x;
}

Eigen::VectorXd sparse_signal(const Eigen::MatrixXd& x, std::uint64_t seed, double noise) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        y(i) = 0.8 * SpectralKernel::basis(1, x(i, 0)) + 0.5 * SpectralKernel::basis(2, x(i, 1)) +
               noise * normal(rng);
    }
    return y;
}

}  // namespace

TEST_CASE("constant responses give the zero function") {
    const auto kernel = make_sobolev_kernel(1.0, 50);
    const Eigen::MatrixXd x = uniform_design(30, 3, 1);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 2.5);
    const AdditiveFit f = fit(x, y, kernel, penalties(0.1, 0.01));
    CHECK(f.intercept == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(f.active_set.empty());
    for (const auto& b : f.block_weights) {
        CHECK(b.norm() == 0.0);
    }
    CHECK(f.objective == doctest::Approx(0.0));
    const Eigen::VectorXd pred = predict(f, kernel, x, uniform_design(5, 3, 2));
    CHECK((pred.array() - 2.5).abs().maxCoeff() < 1e-14);
}

TEST_CASE("heavy penalties zero every block") {
    const auto kernel = make_sobolev_kernel(1.0, 50);
    const Eigen::MatrixXd x = uniform_design(40, 4, 3);
    const Eigen::VectorXd y = sparse_signal(x, 4, 0.5);
    const AdditiveFit f = fit(x, y, kernel, penalties(1e3, 1e3));
    CHECK(f.active_set.empty());
    CHECK(f.objective == doctest::Approx(0.5 * (y.array() - y.mean()).square().mean()).epsilon(1e-14));
    CHECK(f.kkt_residual == 0.0);
}

TEST_CASE("fit reaches the projected-subgradient optimum") {
    for (std::uint64_t seed : {0u, 6u, 12u, 19u}) {
        CAPTURE(seed);
        const auto inst = oracle::solver_instance(seed);
        SolverOptions opts;
        opts.kkt_tol = 1e-10;
        const AdditiveFit f = fit(inst.design, inst.y, inst.kernel, inst.params, opts);
        const auto problem =
            oracle::dense_problem(inst.design, inst.y, inst.kernel, inst.params.lambda_n, inst.params.rho_n);
        const double best = oracle::projected_subgradient(problem, 200000);
        CHECK(f.objective <= best * (1.0 + 1e-12));
        CHECK((best - f.objective) / f.objective < 1e-2);
    }
}

TEST_CASE("solver invariants on seeded instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        const auto inst = oracle::solver_instance(seed);
        const AdditiveFit f = fit(inst.design, inst.y, inst.kernel, inst.params);
        CHECK(f.kkt_residual <= 1e-6);
        CHECK(f.max_objective_increase <= 1e-12);
        for (std::size_t k = 1; k < f.objective_trace.size(); ++k) {
            CHECK(f.objective_trace[k] <= f.objective_trace[k - 1] + 1e-12);
        }
        CHECK(f.max_block_norm <= 1.0 + 1e-8);
        CHECK(f.objective_trace.back() == doctest::Approx(f.objective).epsilon(1e-12));
        CHECK(objective(f, inst.design, inst.y, inst.kernel, inst.params) ==
              doctest::Approx(f.objective).epsilon(1e-10));
        CHECK(kkt_residual(f, inst.design, inst.y, inst.kernel, inst.params) <= 1e-6);

        const auto problem =
            oracle::dense_problem(inst.design, inst.y, inst.kernel, inst.params.lambda_n, inst.params.rho_n);
        CHECK(problem.value(std::vector<Eigen::VectorXd>(problem.dims(), Eigen::VectorXd::Zero(problem.samples()))) ==
              doctest::Approx(f.objective_trace.front()).epsilon(1e-12));
    }
}

TEST_CASE("one sweep either converges or leaves a KKT residual above tolerance") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        const auto inst = oracle::solver_instance(seed);
        SolverOptions one;
        one.max_sweeps = 1;
        try {
            const AdditiveFit f = fit(inst.design, inst.y, inst.kernel, inst.params, one);
            CHECK(f.kkt_residual <= one.kkt_tol);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::not_converged);
            CHECK(fit(inst.design, inst.y, inst.kernel, inst.params).kkt_residual <= 1e-6);
        }
    }
}

TEST_CASE("predictions at training points reproduce in-sample fitted values") {
    const auto kernel = make_sobolev_kernel(1.0, 80);
    const Eigen::MatrixXd x = uniform_design(60, 3, 5);
    const Eigen::VectorXd y = sparse_signal(x, 6, 0.3);
    const AdditiveFit f = fit(x, y, kernel, penalties(0.05, 0.005));
    REQUIRE(!f.active_set.empty());
    const auto factors = factor_design(kernel, x);
    Eigen::VectorXd fitted = Eigen::VectorXd::Zero(60);
    for (std::size_t j = 0; j < f.dims(); ++j) {
        const auto r = f.block_weights[j].size();
        fitted += factors[j].basis.leftCols(r) * f.block_spectra[j].cwiseSqrt().cwiseProduct(f.block_weights[j]);
    }
    const Eigen::VectorXd pred = predict(f, kernel, x, x);
    CHECK(((pred.array() - f.intercept) - fitted.array()).abs().maxCoeff() < 1e-8);

    // Block norms agree with the representer weights.
    for (std::size_t j : f.active_set) {
        const auto col = static_cast<Eigen::Index>(j);
        const Eigen::VectorXd alpha = f.representer_weights.col(col);
        const Eigen::VectorXd in_sample = gram_matrix(kernel, x.col(col)).matrix * alpha;
        CHECK(f.empirical_norm(j) == doctest::Approx(in_sample.norm() / std::sqrt(60.0)).epsilon(1e-8));
        CHECK(f.hilbert_norm(j) == doctest::Approx(std::sqrt(alpha.dot(in_sample))).epsilon(1e-8));
    }
}

TEST_CASE("rank-one predictions lie in the span of the first basis function") {
    const auto kernel = make_finite_rank_kernel(1);
    const Eigen::MatrixXd x = uniform_design(25, 1, 7);
    Eigen::VectorXd y(25);
    for (Eigen::Index i = 0; i < 25; ++i) {
        y(i) = 0.7 * SpectralKernel::basis(1, x(i, 0)) + 0.05 * std::sin(40.0 * x(i, 0));
    }
    const AdditiveFit f = fit(x, y, kernel, penalties(0.01, 0.001));
    REQUIRE(f.active_set.size() == 1);
    const Eigen::MatrixXd z = uniform_design(10, 1, 8);
    const Eigen::VectorXd pred = predict(f, kernel, x, z);
    const double c = population_coefficients(f, kernel, x)(0, 0);
    for (Eigen::Index i = 0; i < 10; ++i) {
        CHECK(pred(i) - f.intercept == doctest::Approx(c * SpectralKernel::basis(1, z(i, 0))).epsilon(1e-10));
    }
}

TEST_CASE("permuting coordinates permutes the fit") {
    const auto kernel = make_sobolev_kernel(1.0, 60);
    const Eigen::MatrixXd x = uniform_design(50, 4, 9);
    const Eigen::VectorXd y = sparse_signal(x, 10, 0.3);
    const RegParams p = penalties(0.04, 0.004);
    SolverOptions opts;
    opts.kkt_tol = 1e-10;
    const std::vector<Eigen::Index> perm{2, 0, 3, 1};
    Eigen::MatrixXd xp(50, 4);
    for (Eigen::Index j = 0; j < 4; ++j) {
        xp.col(j) = x.col(perm[static_cast<std::size_t>(j)]);
    }
    const AdditiveFit a = fit(x, y, kernel, p, opts);
    const AdditiveFit b = fit(xp, y, kernel, p, opts);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-10));
    for (std::size_t j = 0; j < 4; ++j) {
        const auto src = static_cast<std::size_t>(perm[j]);
        CHECK(b.empirical_norm(j) == doctest::Approx(a.empirical_norm(src)).epsilon(1e-5));
        CHECK(b.hilbert_norm(j) == doctest::Approx(a.hilbert_norm(src)).epsilon(1e-5));
    }
}

TEST_CASE("kkt_residual flags the zero function when penalties are small") {
    const auto kernel = make_sobolev_kernel(1.0, 50);
    const Eigen::MatrixXd x = uniform_design(40, 2, 11);
    const Eigen::VectorXd y = sparse_signal(x, 12, 0.1);
    const AdditiveFit zero = fit(x, y, kernel, penalties(1e3, 1e3));
    REQUIRE(zero.active_set.empty());
    CHECK(kkt_residual(zero, x, y, kernel, penalties(1e-4, 1e-5)) > 1e-6);
    CHECK(kkt_residual(zero, x, y, kernel, penalties(1e3, 1e3)) == 0.0);
}

TEST_CASE("unpenalized fit interpolates a small signal") {
    const auto kernel = make_sobolev_kernel(1.0, 50);
    const Eigen::MatrixXd x = uniform_design(8, 1, 13);
    Eigen::VectorXd y(8);
    std::mt19937_64 rng(14);
    std::normal_distribution<double> normal(0.0, 1e-3);
    for (Eigen::Index i = 0; i < 8; ++i) {
        y(i) = normal(rng);
    }
    SolverOptions opts;
    opts.kkt_tol = 1e-12;
    const AdditiveFit f = fit(x, y, kernel, penalties(0.0, 0.0), opts);
    const Eigen::VectorXd pred = predict(f, kernel, x, x);
    CHECK((pred - y).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(f.hilbert_norm(0) < 1.0);
}

TEST_CASE("input validation") {
    const auto kernel = make_sobolev_kernel(1.0, 20);
    const Eigen::MatrixXd x = uniform_design(10, 2, 15);
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(10);
    CHECK_THROWS_AS(fit(x, Eigen::VectorXd::Ones(9), kernel, penalties(0.1, 0.1)), Error);
    CHECK_THROWS_AS(fit(x, y, kernel, penalties(-0.1, 0.1)), Error);
    SolverOptions bad;
    bad.max_sweeps = 0;
    CHECK_THROWS_AS(fit(x, y, kernel, penalties(0.1, 0.1), bad), Error);
    const AdditiveFit f = fit(x, y, kernel, penalties(0.1, 0.1));
    CHECK_THROWS_AS(predict(f, kernel, x, uniform_design(3, 3, 16)), Error);
}
