#include <doctest.h>

#include <cmath>
#include <vector>

#include "bmlab/errors.hpp"
#include "bmlab/hurst.hpp"

using namespace bmlab;

namespace {

// Build an exactly consistent coarse/fine pair whose variation ratio encodes a
// chosen Hurst value: each coarse increment of 1 splits into (a, 1-a) with
// a^2 + (1-a)^2 = lambda^{1-pH} for p = 2, lambda = 2.
hurst::NestedPair manufactured_pair(double H, std::size_t n) {
    const double target = std::pow(2.0, 1.0 - 2.0 * H);
    const double disc = std::sqrt(1.0 + 2.0 * (target - 1.0));
    const double a = 0.5 * (1.0 + disc);
    hurst::NestedPair p;
    p.coarse.assign(n, 1.0);
    p.fine.resize(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        p.fine[2 * j] = a;
        p.fine[2 * j + 1] = 1.0 - a;
    }
    return p;
}

}  // namespace

TEST_CASE("power_variation basics") {
    CHECK(hurst::power_variation({0.0, 0.0, 0.0}, 2.0) == 0.0);
    CHECK(hurst::power_variation({1.0, -1.0, 1.0, -1.0}, 2.0) == doctest::Approx(4.0));
    CHECK(hurst::power_variation({2.0, -2.0}, 3.0) == doctest::Approx(16.0));
}

TEST_CASE("estimate_hurst inverts a manufactured ratio exactly") {
    for (double H : {0.3, 0.5, 0.62, 0.7}) {
        const auto pair = manufactured_pair(H, 64);
        const auto r = hurst::estimate_hurst(pair.coarse, pair.fine, 2.0, 2);
        CHECK(r.h_hat == doctest::Approx(H).epsilon(1e-12));
        CHECK(r.lambda == 2);
        CHECK(r.n == 64);
    }
}

TEST_CASE("estimate_hurst input validation") {
    const auto pair = manufactured_pair(0.5, 16);
    CHECK_THROWS_AS(hurst::estimate_hurst(pair.coarse, pair.fine, 2.0, 1), ConfigInvalid);
    // fine not a refinement of coarse
    auto broken = pair;
    broken.fine[0] += 0.5;
    CHECK_THROWS_AS(hurst::estimate_hurst(broken.coarse, broken.fine, 2.0, 2),
                    InconsistentRefinement);
    // length mismatch
    auto shorter = pair;
    shorter.fine.pop_back();
    CHECK_THROWS_AS(hurst::estimate_hurst(shorter.coarse, shorter.fine, 2.0, 2),
                    InconsistentRefinement);
    // all-zero variation
    const std::vector<double> zc(8, 0.0), zf(16, 0.0);
    CHECK_THROWS_AS(hurst::estimate_hurst(zc, zf, 2.0, 2), NonPositiveVariation);
}

TEST_CASE("simulate_nested_pair is internally consistent and deterministic") {
    const auto a = hurst::simulate_nested_pair(0.7, 256, 2, 9, 3);
    const auto b = hurst::simulate_nested_pair(0.7, 256, 2, 9, 3);
    CHECK(a.fine == b.fine);
    REQUIRE(a.coarse.size() == 256);
    REQUIRE(a.fine.size() == 512);
    for (std::size_t j = 0; j < a.coarse.size(); ++j) {
        CHECK(a.coarse[j] ==
              doctest::Approx(a.fine[2 * j] + a.fine[2 * j + 1]).epsilon(1e-14).scale(1.0));
    }
    const auto c = hurst::simulate_nested_pair(0.7, 256, 2, 9, 4);
    CHECK(a.fine != c.fine);

    // The estimator accepts the simulated pair without complaint.
    const auto r = hurst::estimate_hurst(a.coarse, a.fine, 2.0, 2);
    CHECK(r.h_hat > 0.0);
    CHECK(r.h_hat < 1.0);
}

TEST_CASE("Brownian case: mean of the estimate hits H = 1/2") {
    const std::size_t reps = 200;
    double sum = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto pair = hurst::simulate_nested_pair(0.5, 4096, 2, 1234, rep);
        sum += hurst::estimate_hurst(pair.coarse, pair.fine, 2.0, 2).h_hat;
    }
    CHECK(sum / static_cast<double>(reps) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("consistency_experiment flags the out-of-theorem region") {
    const auto in_range = hurst::consistency_experiment(0.6, 2.0, 2, {256, 512}, 20, 5);
    CHECK_FALSE(in_range.out_of_theorem);
    REQUIRE(in_range.rows.size() == 2);
    for (const auto& row : in_range.rows) {
        CHECK(row.mean_h_hat > 0.3);
        CHECK(row.mean_h_hat < 0.9);
        CHECK(row.sd_h_hat > 0.0);
    }
    const auto high_h = hurst::consistency_experiment(0.8, 2.0, 2, {256}, 5, 5);
    CHECK(high_h.out_of_theorem);
    const auto bad_p = hurst::consistency_experiment(0.5, 2.5, 2, {256}, 5, 5);
    CHECK(bad_p.out_of_theorem);
}
