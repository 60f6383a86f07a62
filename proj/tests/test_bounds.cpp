#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>

#include "oracles.hpp"
#include "spamkern/bounds.hpp"
#include "spamkern/error.hpp"
#include "spamkern/rates.hpp"

using namespace spamkern;

namespace {

using u128 = unsigned __int128;

u128 binomial(std::uint64_t n, std::uint64_t k) {
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

u128 power(std::uint64_t b, std::uint64_t e) {
    u128 r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        r *= b;
    }
    return r;
}

// Every codeword over {0..N}^d with exactly s nonzero symbols.
std::vector<Codeword> all_codewords(std::size_t d, std::size_t s, std::uint32_t alphabet) {
    std::vector<Codeword> out;
    Codeword u(d, 0);
    const auto total = static_cast<std::size_t>(power(alphabet + 1, d));
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        std::size_t nonzero = 0;
        for (std::size_t j = 0; j < d; ++j) {
            u[j] = static_cast<std::uint32_t>(c % (alphabet + 1));
            c /= alphabet + 1;
            nonzero += u[j] != 0 ? 1 : 0;
        }
        if (nonzero == s) {
            out.push_back(u);
        }
    }
    return out;
}

// Largest subset with pairwise distance >= min_dist, by enumerating all subsets.
std::size_t max_packing_size(const std::vector<Codeword>& all, std::size_t min_dist) {
    const std::size_t m = all.size();
    REQUIRE(m <= 20);
    std::size_t best = 0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size <= best) {
            continue;
        }
        bool ok = true;
        for (std::size_t a = 0; a < m && ok; ++a) {
            if (!(mask & (1u << a))) {
                continue;
            }
            for (std::size_t b = a + 1; b < m && ok; ++b) {
                if ((mask & (1u << b)) && hamming_distance(all[a], all[b]) < min_dist) {
                    ok = false;
                }
            }
        }
        if (ok) {
            best = size;
        }
    }
    return best;
}

void check_packing(const PackingSet& pack) {
    const std::size_t need = (pack.s + 1) / 2;
    std::set<Codeword> unique(pack.codewords.begin(), pack.codewords.end());
    CHECK(unique.size() == pack.codewords.size());
    std::size_t worst = pack.d + 1;
    for (std::size_t a = 0; a < pack.codewords.size(); ++a) {
        const Codeword& u = pack.codewords[a];
        REQUIRE(u.size() == pack.d);
        CHECK(std::count_if(u.begin(), u.end(), [](std::uint32_t v) { return v != 0; }) ==
              static_cast<std::ptrdiff_t>(pack.s));
        CHECK(*std::max_element(u.begin(), u.end()) <= pack.alphabet_size);
        for (std::size_t b = a + 1; b < pack.codewords.size(); ++b) {
            std::size_t dist = 0;
            for (std::size_t j = 0; j < pack.d; ++j) {
                dist += u[j] != pack.codewords[b][j] ? 1 : 0;
            }
            worst = std::min(worst, dist);
        }
    }
    CHECK(worst >= need);
    CHECK(pack.min_distance == worst);
}

// Squared L2 distance implied by the codewords alone: a coordinate where the
// symbols differ contributes amp^2 for each nonzero symbol.
double coded_distance_sq(const Codeword& u, const Codeword& v, double amp) {
    double out = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j] != v[j]) {
            out += amp * amp * ((u[j] != 0 ? 1.0 : 0.0) + (v[j] != 0 ? 1.0 : 0.0));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("n_star worked examples") {
    CHECK(n_star(4, 2, 1) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(n_star(12, 2, 3) == doctest::Approx(0.5 * (66.0 / 12.0) * (9.0 / 4.0)).epsilon(1e-14));
    CHECK_THROWS_AS(n_star(5, 3, 1), Error);
    CHECK_THROWS_AS(n_star(4, 6, 1), Error);
    CHECK_THROWS_AS(n_star(4, 2, 0), Error);
}

TEST_CASE("n_star agrees with exact rational arithmetic for d <= 20") {
    for (std::uint64_t d = 2; d <= 20; ++d) {
        for (std::uint64_t s = 2; s <= d; s += 2) {
            for (std::uint64_t alphabet = 1; alphabet <= 4; ++alphabet) {
                const u128 num = binomial(d, s) * power(alphabet, s);
                const u128 den = 2 * binomial(d, s / 2) * power(alphabet + 1, s / 2);
                const double exact = static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
                CAPTURE(d);
                CAPTURE(s);
                CAPTURE(alphabet);
                CHECK(n_star(d, s, alphabet) == doctest::Approx(exact).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("n_star grows with the alphabet") {
    double prev = 0.0;
    for (std::size_t alphabet = 1; alphabet <= 50; ++alphabet) {
        const double v = n_star(10, 4, alphabet);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(n_star(10, 4, 10000) / n_star(10, 4, 5000) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("greedy packing reaches floor(n_star) with certified distance") {
    for (auto [d, s, alphabet] : {std::tuple{8u, 2u, 2u}, std::tuple{12u, 2u, 3u}, std::tuple{10u, 4u, 2u}}) {
        CAPTURE(d);
        CAPTURE(s);
        Rng rng(derive_seed(21, {d, s, alphabet}));
        const auto target = static_cast<std::size_t>(std::floor(n_star(d, s, alphabet)));
        const PackingSet pack = greedy_packing(d, s, alphabet, target, rng);
        CHECK(pack.codewords.size() == target);
        check_packing(pack);
        CHECK(min_pairwise_distance(pack.codewords, d) == pack.min_distance);
    }
}

TEST_CASE("greedy packing on tiny alphabets") {
    Rng rng(22);
    const PackingSet one = greedy_packing(4, 2, 1, 1, rng);
    CHECK(one.codewords.size() == 1);
    CHECK(one.min_distance == 5);
    check_packing(one);

    for (auto [d, s] : {std::pair{6u, 2u}, std::pair{6u, 4u}, std::pair{5u, 3u}}) {
        CAPTURE(d);
        CAPTURE(s);
        const std::size_t best = max_packing_size(all_codewords(d, s, 1), (s + 1) / 2);
        const PackingSet pack = greedy_packing(d, s, 1, 1000, rng);
        check_packing(pack);
        CHECK(pack.codewords.size() >= 1);
        CHECK(pack.codewords.size() <= best);
    }
    CHECK_THROWS_AS(greedy_packing(3, 4, 1, 10, rng), Error);
}

TEST_CASE("hamming distance helpers") {
    CHECK(hamming_distance({0, 1, 2}, {0, 2, 2}) == 1);
    CHECK(hamming_distance({1, 1, 0}, {1, 1, 0}) == 0);
    CHECK(min_pairwise_distance({}, 7) == 8);
    CHECK(min_pairwise_distance({{1, 0}, {0, 1}, {1, 1}}, 2) == 1);
    CHECK_THROWS_AS(hamming_distance({1}, {1, 0}), Error);
}

TEST_CASE("packing functions are separated exactly as the codewords predict") {
    const auto kernel = make_sobolev_kernel(1.0, 50);
    Rng rng(23);
    const double scale = 0.1;
    const PackingSet pack = greedy_packing(8, 2, 2, 1000, rng);
    const auto functions = packing_to_functions(pack, kernel, scale);
    REQUIRE(functions.size() == pack.codewords.size());
    const double amp = scale / std::sqrt(2.0);
    for (std::size_t a = 0; a < functions.size(); ++a) {
        CHECK(functions[a].rows() == 50);
        CHECK(functions[a].cols() == 8);
        CHECK((functions[a] - functions[a]).squaredNorm() == 0.0);
        for (std::size_t b = a + 1; b < functions.size(); ++b) {
            const double dist_sq = (functions[a] - functions[b]).squaredNorm();
            CHECK(dist_sq == doctest::Approx(coded_distance_sq(pack.codewords[a], pack.codewords[b], amp)).epsilon(1e-14));
            CHECK(dist_sq >= scale * scale * (1.0 - 1e-12));
        }
    }

    PackingSet manual{.d = 4, .s = 2, .alphabet_size = 2, .codewords = {{1, 2, 0, 0}, {0, 0, 2, 1}}, .min_distance = 4};
    const auto pair = packing_to_functions(manual, kernel, 0.2);
    CHECK((pair[0] - pair[1]).squaredNorm() == doctest::Approx(4.0 * 0.04 / 2.0).epsilon(1e-14));

    PackingSet wide{.d = 2, .s = 1, .alphabet_size = 5, .codewords = {{5, 0}}, .min_distance = 3};
    CHECK_THROWS_AS(packing_to_functions(wide, make_finite_rank_kernel(4), 0.1), Error);
    PackingSet loud{.d = 2, .s = 1, .alphabet_size = 2, .codewords = {{2, 0}}, .min_distance = 3};
    CHECK_THROWS_AS(packing_to_functions(loud, kernel, 0.9), Error);
}

TEST_CASE("fano bound") {
    CHECK(fano_bound(100, 0.01, 10.0) == doctest::Approx(1.0 - (0.32 + std::log(2.0)) / 10.0).epsilon(1e-14));
    CHECK(fano_bound(100, 0.01, 10.0) == doctest::Approx(0.89869).epsilon(1e-5));
    CHECK(fano_bound(100, 1.0, 10.0) == 0.0);
    CHECK(fano_bound(1, 1e-6, 1e12) == doctest::Approx(1.0).epsilon(1e-10));
    double prev = 2.0;
    for (std::size_t n : {10u, 100u, 1000u}) {
        const double v = fano_bound(n, 0.01, 20.0);
        CHECK(v <= prev);
        prev = v;
    }
    prev = 2.0;
    for (double delta : {0.001, 0.01, 0.05, 0.1}) {
        const double v = fano_bound(100, delta, 20.0);
        CHECK(v <= prev);
        prev = v;
    }
    prev = -1.0;
    for (double log_m : {1.0, 5.0, 20.0, 100.0}) {
        const double v = fano_bound(100, 0.01, log_m);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("localized sup is feasible with a tight dual") {
    std::mt19937_64 rng(24);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 8);
        const std::size_t n = 20 + rng() % 200;
        Eigen::VectorXd c(r);
        Eigen::VectorXd spectrum(r);
        for (Eigen::Index i = 0; i < r; ++i) {
            c(i) = normal(rng);
            spectrum(i) = static_cast<double>(n) * std::pow(unif(rng), 3.0);
        }
        const double t = 0.01 + unif(rng);
        const LocalizedSup sup = localized_sup(c, spectrum, n, t);
        CAPTURE(trial);
        CHECK(sup.ball_residual <= 1e-8);
        CHECK(sup.seminorm_residual <= 1e-8);
        CHECK(sup.beta.norm() <= 1.0 + 1e-8);
        CHECK(std::sqrt(sup.beta.dot(spectrum.cwiseProduct(sup.beta)) / static_cast<double>(n)) <= t + 1e-8);
        CHECK(sup.value == doctest::Approx(c.dot(sup.beta)).epsilon(1e-12));
        CHECK(sup.dual >= sup.value - 1e-12);
        CHECK(sup.dual - sup.value <= 1e-8 * std::max(1.0, sup.dual));
    }
}

TEST_CASE("localized sup closed forms") {
    const Eigen::VectorXd c = Eigen::Vector2d(3.0, 4.0);
    // Seminorm inactive: the unit ball answer ||c||.
    CHECK(localized_sup(c, Eigen::Vector2d(1e-6, 1e-6), 10, 1.0).value == doctest::Approx(5.0).epsilon(1e-8));
    // Equal spectrum: both constraints are balls, the tighter radius wins.
    const LocalizedSup eq = localized_sup(c, Eigen::Vector2d(40.0, 40.0), 10, 0.5);
    CHECK(eq.value == doctest::Approx(5.0 * 0.25).epsilon(1e-8));
    CHECK(localized_sup(c, Eigen::Vector2d(1.0, 1.0), 10, 0.0).value == doctest::Approx(0.0));
}

TEST_CASE("rank-one Gaussian complexity matches its closed form") {
    const auto kernel = make_finite_rank_kernel(1);
    std::mt19937_64 gen(25);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t n = 50;
    Eigen::VectorXd column(n);
    for (std::size_t i = 0; i < n; ++i) {
        column(static_cast<Eigen::Index>(i)) = unif(gen);
    }
    double phi_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = SpectralKernel::basis(1, column(static_cast<Eigen::Index>(i)));
        phi_sq += v * v;
    }
    const double phi = std::sqrt(phi_sq);
    const double nd = static_cast<double>(n);
    for (double t : {0.05, 0.3, 2.0}) {
        CAPTURE(t);
        Rng rng(derive_seed(26, {static_cast<std::uint64_t>(t * 1000)}));
        const McEstimate mc = gaussian_complexity_mc(kernel, column, t, 4000, rng);
        const double expected = std::min(1.0, t * std::sqrt(nd) / phi) * phi * std::sqrt(2.0 / M_PI) / nd;
        CHECK(std::abs(mc.mean - expected) <= 3.0 * mc.std_err);
        CHECK(mc.std_err > 0.0);
    }
    Rng rng(27);
    const McEstimate zero = gaussian_complexity_mc(kernel, column, 0.0, 30, rng);
    CHECK(zero.mean == 0.0);
    CHECK(zero.std_err == 0.0);
    CHECK_THROWS_AS(gaussian_complexity_mc(kernel, column, 0.1, 10, rng), Error);
}

TEST_CASE("Gaussian complexity tracks q_sigma within a fixed band") {
    const auto kernel = make_sobolev_kernel(1.0, 1000);
    const std::size_t n = 200;
    Rng design_rng(28);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd column(n);
    for (std::size_t i = 0; i < n; ++i) {
        column(static_cast<Eigen::Index>(i)) = unif(design_rng);
    }
    double lo = 1e300;
    double hi = 0.0;
    for (double t : {0.05, 0.1, 0.2, 0.4}) {
        Rng rng(derive_seed(29, {static_cast<std::uint64_t>(t * 1000)}));
        const double ratio = gaussian_complexity_mc(kernel, column, t, 200, rng).mean / q_sigma(t, kernel, n);
        CHECK(ratio >= 0.1);
        CHECK(ratio <= 10.0);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(hi / lo < 4.0);
}

TEST_CASE("empirical and population norms sandwich above the critical rate") {
    const auto kernel = make_sobolev_kernel(1.0, 200);
    Rng rng(30);
    const double freq = sandwich_check(kernel, 2000, 200, 10.0 * critical_rate(kernel, 2000), rng);
    CHECK(freq >= 0.95);
    CHECK(freq <= 1.0);

    std::vector<double> trend;
    for (std::size_t n : {200u, 800u, 3200u}) {
        Rng r(derive_seed(31, {n}));
        trend.push_back(sandwich_check(kernel, n, 200, 10.0 * critical_rate(kernel, n), r));
    }
    int inversions = 0;
    for (std::size_t a = 0; a < trend.size(); ++a) {
        for (std::size_t b = a + 1; b < trend.size(); ++b) {
            inversions += trend[b] < trend[a] ? 1 : 0;
        }
    }
    CHECK(inversions <= 1);
}
