#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bmlab/errors.hpp"
#include "bmlab/paths.hpp"

using namespace bmlab;
using paths::CovarianceModel;

TEST_CASE("fGn autocovariance closed forms") {
    CHECK(paths::rho(CovarianceModel::fgn(0.7), 0) == doctest::Approx(1.0));
    CHECK(paths::rho(CovarianceModel::fgn(0.5), 3) == doctest::Approx(0.0));
    CHECK(paths::rho(CovarianceModel::fgn(0.75), 1) ==
          doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(paths::rho(CovarianceModel::fgn(0.6), -5) ==
          doctest::Approx(paths::rho(CovarianceModel::fgn(0.6), 5)).epsilon(1e-15));
}

TEST_CASE("fGn large-lag series branch is continuous with the direct branch") {
    // The implementation switches to a binomial series at large |k|; the two
    // branches must agree across the switch point.
    for (double H : {0.55, 0.7, 0.9}) {
        const auto m = CovarianceModel::fgn(H);
        const double below = paths::rho(m, 9999);
        const double at = paths::rho(m, 10000);
        const double expected_ratio = std::pow(10000.0 / 9999.0, 2.0 * H - 2.0);
        CHECK(at / below == doctest::Approx(expected_ratio).epsilon(1e-5));
    }
}

TEST_CASE("power-law and table models") {
    const auto pl = CovarianceModel::power_law(1.5);
    CHECK(paths::rho(pl, 0) == 1.0);
    CHECK(paths::rho(pl, 3) == doctest::Approx(std::pow(4.0, -1.5)).epsilon(1e-15));
    CHECK(pl.decay_exponent().value() == doctest::Approx(1.5));

    const auto tab = CovarianceModel::from_table({1.0, 0.25});
    CHECK(paths::rho(tab, 1) == 0.25);
    CHECK(paths::rho(tab, 2) == 0.0);
    CHECK(paths::rho(tab, -1) == 0.25);

    CHECK_THROWS_AS(CovarianceModel::fgn(1.5), ConfigInvalid);
    CHECK_THROWS_AS(CovarianceModel::power_law(-1.0), ConfigInvalid);
    CHECK_THROWS_AS(CovarianceModel::from_table({2.0, 0.1}), ConfigInvalid);
}

TEST_CASE("generation is deterministic given the seed") {
    const auto m = CovarianceModel::fgn(0.7);
    const auto a = paths::generate(m, 128, 4, 42);
    const auto b = paths::generate(m, 128, 4, 42);
    CHECK(a.data == b.data);
    const auto c = paths::generate(m, 128, 4, 43);
    CHECK(a.data != c.data);
}

TEST_CASE("white noise marginals") {
    const auto b = paths::generate(CovarianceModel::white(), 256, 4096, 11);
    double mean = 0.0, var = 0.0;
    for (double x : b.data) mean += x;
    mean /= static_cast<double>(b.data.size());
    for (double x : b.data) var += (x - mean) * (x - mean);
    var /= static_cast<double>(b.data.size() - 1);
    const double se_mean = 1.0 / std::sqrt(static_cast<double>(b.data.size()));
    CHECK(std::abs(mean) < 4.0 * se_mean);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("fGn sample autocovariance matches the model at small lags") {
    const auto m = CovarianceModel::fgn(0.6);
    const auto b = paths::generate(m, 512, 2048, 5);
    const auto est = paths::sample_autocovariance(b, 4);
    for (std::size_t k = 0; k <= 4; ++k) {
        const double target = paths::rho(m, static_cast<long long>(k));
        CHECK(std::abs(est.values[k] - target) < 4.0 * est.ses[k]);
    }
    CHECK_THROWS_AS(paths::sample_autocovariance(b, 512), LagTooLarge);
}

TEST_CASE("circulant embedding succeeds for fGn across the Hurst range") {
    for (double H : {0.1, 0.3, 0.5, 0.6, 0.75, 0.9}) {
        for (std::size_t n : {64ull, 512ull}) {
            const auto b = paths::generate(CovarianceModel::fgn(H), n, 1, 1);
            CHECK_FALSE(b.used_cholesky_fallback);
            CHECK(b.data.size() == n);
        }
    }
    const auto big = paths::generate(CovarianceModel::fgn(0.85), 4096, 1, 1);
    CHECK_FALSE(big.used_cholesky_fallback);
}

TEST_CASE("non-embeddable non-PSD table is rejected") {
    // Toeplitz matrix for this table (n=3) is not positive semidefinite, so
    // both the embedding and the dense fallback must fail.
    const auto m = CovarianceModel::from_table({1.0, 0.9, 0.1});
    CHECK_THROWS_AS(paths::generate(m, 3, 1, 7), NotEmbeddable);
}

TEST_CASE("partial-sum variance reflects long-range dependence") {
    const double H = 0.7;
    const std::size_t n = 64, paths_count = 4096;
    const auto b = paths::generate(CovarianceModel::fgn(H), n, paths_count, 99);
    std::vector<double> sums(paths_count);
    for (std::size_t i = 0; i < paths_count; ++i) {
        const double* p = b.path(i);
        sums[i] = std::accumulate(p, p + n, 0.0);
    }
    double var = 0.0;
    for (double s : sums) var += s * s;
    var /= static_cast<double>(paths_count);
    const double target = std::pow(static_cast<double>(n), 2.0 * H);
    // SE of a chi^2-type variance estimate: var * sqrt(2/paths).
    const double se = target * std::sqrt(2.0 / static_cast<double>(paths_count));
    CHECK(std::abs(var - target) < 4.0 * se);
}

TEST_CASE("stationarity: per-coordinate variance is flat along the path") {
    const auto b = paths::generate(CovarianceModel::fgn(0.8), 128, 8192, 3);
    for (std::size_t j : {0ull, 63ull, 127ull}) {
        double v = 0.0;
        for (std::size_t i = 0; i < b.num_paths; ++i) v += b.path(i)[j] * b.path(i)[j];
        v /= static_cast<double>(b.num_paths);
        CHECK(v == doctest::Approx(1.0).epsilon(0.07));
    }
}

TEST_CASE("abs_rho_power_sum partial sums") {
    const auto w = CovarianceModel::white();
    CHECK(paths::abs_rho_power_sum(w, 1.0, 100) == doctest::Approx(1.0));
    const auto pl = CovarianceModel::power_law(2.0);
    // 1 + 2 sum_{k=1..2} (1+k)^{-2} = 1 + 2(1/4 + 1/9)
    CHECK(paths::abs_rho_power_sum(pl, 1.0, 2) ==
          doctest::Approx(1.0 + 2.0 * (0.25 + 1.0 / 9.0)).epsilon(1e-15));
    CHECK(paths::abs_rho_power_sum(pl, 1.0, 1000) > paths::abs_rho_power_sum(pl, 1.0, 10));
}

TEST_CASE("fbm_increments_unit_scale matches generate") {
    const auto m = CovarianceModel::fgn(0.65);
    const auto a = paths::generate(m, 64, 2, 17);
    const auto b = paths::fbm_increments_unit_scale(m, 64, 2, 17);
    CHECK(a.data == b.data);
}
