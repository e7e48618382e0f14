#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "bmlab/errors.hpp"
#include "bmlab/hermite.hpp"

using namespace bmlab;
using hermite::FunctionSpec;
using hermite::HermiteExpansion;

namespace {

// Independent high-accuracy oracle: integral of f against the standard
// Gaussian measure via tanh-sinh on (0, 40), assuming f even in |x| form.
double gaussian_integral_even(const std::function<double(double)>& f) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto h = [&](double x) { return f(x) * std::exp(-x * x / 2.0) / std::sqrt(2.0 * M_PI); };
    return 2.0 * integrator.integrate(h, 0.0, 40.0);
}

HermiteExpansion random_int_poly(std::mt19937_64& rng, int max_deg) {
    std::uniform_int_distribution<int> deg_dist(1, max_deg);
    std::uniform_int_distribution<int> coef_dist(-3, 3);
    const int deg = deg_dist(rng);
    std::vector<double> c(static_cast<std::size_t>(deg) + 1);
    for (auto& v : c) v = static_cast<double>(coef_dist(rng));
    c[static_cast<std::size_t>(deg)] = c[static_cast<std::size_t>(deg)] == 0.0 ? 1.0 : c[static_cast<std::size_t>(deg)];
    return {c, std::nullopt};
}

}  // namespace

TEST_CASE("hermite_eval matches closed forms") {
    CHECK(hermite::hermite_eval(2, 1.0) == doctest::Approx(0.0));
    CHECK(hermite::hermite_eval(3, 2.0) == doctest::Approx(2.0));
    CHECK(hermite::hermite_eval(4, 0.0) == doctest::Approx(3.0));
    CHECK(hermite::hermite_eval(0, 17.0) == doctest::Approx(1.0));
    CHECK(hermite::hermite_eval(1, -2.5) == doctest::Approx(-2.5));
}

TEST_CASE("polynomial expansion is exact coefficient arithmetic") {
    const auto e = hermite::expand(FunctionSpec::polynomial({0.0, 0.0, 1.0}), 4, 5);  // x^2
    REQUIRE(e.coeffs.size() == 5);
    CHECK(e.coeffs[0] == 1.0);
    CHECK(e.coeffs[1] == 0.0);
    CHECK(e.coeffs[2] == 1.0);
    CHECK(e.coeffs[3] == 0.0);
    CHECK(e.coeffs[4] == 0.0);

    // x^3 = H_3 + 3 H_1
    const auto e3 = hermite::expand(FunctionSpec::polynomial({0.0, 0.0, 0.0, 1.0}));
    CHECK(e3.coeffs[1] == 3.0);
    CHECK(e3.coeffs[3] == 1.0);
    CHECK(e3.coeffs[0] == 0.0);
    CHECK(e3.coeffs[2] == 0.0);
}

TEST_CASE("abs_power expansion: rank 2 and quadrature-vs-oracle coefficient") {
    const auto e = hermite::expand(FunctionSpec::abs_power(2.5, true), 12, 200);
    CHECK(std::abs(e.coeffs[0]) < 1e-9);
    CHECK(e.coeffs[1] == 0.0);
    CHECK(std::abs(e.coeffs[2]) > 0.1);
    CHECK(hermite::hermite_rank(e) == 2);

    // c_2 of |x|^3 - c_3 equals (1/2) E[|Z|^3 (Z^2-1)], computed independently.
    const auto e3 = hermite::expand(FunctionSpec::abs_power(3.0, true), 12, 1000);
    const double oracle = 0.5 * gaussian_integral_even([](double x) {
        return std::pow(x, 3.0) * (x * x - 1.0);
    });
    CHECK(e3.coeffs[2] == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(hermite::hermite_rank(e3) == 2);
}

TEST_CASE("quadrature agrees with exact expansion for a polynomial integrand") {
    // |x|^4 = x^4: the quadrature route must match exact monomial conversion.
    const auto quad = hermite::expand(FunctionSpec::abs_power(4.0, false), 8, 64);
    const auto exact = hermite::expand(FunctionSpec::polynomial({0, 0, 0, 0, 1}), 8, 64);
    for (std::size_t m = 0; m < quad.coeffs.size(); ++m) {
        CHECK(quad.coeffs[m] == doctest::Approx(exact.coeffs[m]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("hermite_rank on simple expansions and its error cases") {
    CHECK(hermite::hermite_rank({{0.0, 0.0, 1.0}, std::nullopt}) == 2);  // x^2 - 1 = H_2
    CHECK(hermite::hermite_rank({{0.0, 0.0, 0.0, 1.0}, std::nullopt}) == 3);
    CHECK_THROWS_AS(hermite::hermite_rank({{1.0, 0.0, 1.0}, std::nullopt}), NotCentered);
    CHECK_THROWS_AS(hermite::hermite_rank({{0.0, 0.0, 0.0}, std::nullopt}), AllBelowTolerance);
}

TEST_CASE("shift operator") {
    const auto h2 = hermite::expand(FunctionSpec::hermite_single(2));
    const auto t1 = hermite::shift(h2, 1);
    REQUIRE(t1.coeffs.size() == 2);
    CHECK(t1.coeffs[0] == 0.0);
    CHECK(t1.coeffs[1] == 1.0);  // H_1

    const auto h3 = hermite::expand(FunctionSpec::hermite_single(3));
    const auto t2 = hermite::shift(h3, 2);
    CHECK(t2.coeffs == std::vector<double>{0.0, 1.0});

    // x^3 = 3H_1 + H_3; T_1 gives 3H_0 + H_2 = x^2 + 2.
    const auto cube = hermite::expand(FunctionSpec::polynomial({0, 0, 0, 1}));
    const auto tc = hermite::shift(cube, 1);
    CHECK(tc.coeffs == std::vector<double>{3.0, 0.0, 1.0});
    CHECK(hermite::eval_expansion(tc, 2.0) == doctest::Approx(6.0));

    CHECK_THROWS_AS(hermite::shift(h2, 3), ShiftExceedsTruncation);
}

TEST_CASE("differentiate in coefficient space") {
    const auto h2 = hermite::expand(FunctionSpec::hermite_single(2));
    CHECK(hermite::differentiate(h2, 1).coeffs == std::vector<double>{0.0, 2.0});
    const auto h3 = hermite::expand(FunctionSpec::hermite_single(3));
    CHECK(hermite::differentiate(h3, 2).coeffs == std::vector<double>{0.0, 6.0});
    // d/dx x^3 = 3x^2 = 3H_2 + 3H_0
    const auto cube = hermite::expand(FunctionSpec::polynomial({0, 0, 0, 1}));
    CHECK(hermite::differentiate(cube, 1).coeffs == std::vector<double>{3.0, 0.0, 3.0});
}

TEST_CASE("abs_moment closed form vs quadrature oracle") {
    CHECK(hermite::abs_moment(2.0) == doctest::Approx(1.0));
    CHECK(hermite::abs_moment(4.0) == doctest::Approx(3.0));
    CHECK(hermite::abs_moment(3.0) == doctest::Approx(1.5957691216057308));
    for (double p : {1.0, 2.0, 2.5, 3.0, 4.0}) {
        const double oracle = gaussian_integral_even([p](double x) { return std::pow(x, p); });
        CHECK(hermite::abs_moment(p) == doctest::Approx(oracle).epsilon(1e-11));
    }
}

TEST_CASE("eval_expansion via Clenshaw") {
    CHECK(hermite::eval_expansion({{0.0, 0.0, 1.0}, std::nullopt}, 2.0) == doctest::Approx(3.0));
    CHECK(hermite::eval_expansion({{-1.0, 0.0, 1.0}, std::nullopt}, 2.0) == doctest::Approx(2.0));
    CHECK(hermite::eval_expansion({{0.0, 0.0, 0.0}, std::nullopt}, 1.234) == 0.0);
    const auto e = hermite::expand(FunctionSpec::abs_power(3.0, true), 20, 200);
    const double expected = std::pow(1.5, 3.0) - hermite::abs_moment(3.0);
    CHECK(hermite::eval_expansion(e, 1.5) == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("shift composition and derivative/shift identities, coefficient-exact") {
    std::mt19937_64 rng(12345);
    auto expect_equal = [](const HermiteExpansion& a, const HermiteExpansion& b) {
        const std::size_t len = std::max(a.coeffs.size(), b.coeffs.size());
        for (std::size_t m = 0; m < len; ++m) {
            const double av = m < a.coeffs.size() ? a.coeffs[m] : 0.0;
            const double bv = m < b.coeffs.size() ? b.coeffs[m] : 0.0;
            CHECK(av == bv);
        }
    };
    for (int trial = 0; trial < 50; ++trial) {
        const auto e = random_int_poly(rng, 12);
        const int M = e.truncation();
        std::uniform_int_distribution<int> kd(0, M);
        const int k1 = kd(rng);
        std::uniform_int_distribution<int> kd2(0, M - k1);
        const int k2 = kd2(rng);
        expect_equal(hermite::shift(hermite::shift(e, k1), k2), hermite::shift(e, k1 + k2));

        if (M >= 2) {
            // g_1' = T_1(g') - g_2
            const auto lhs = hermite::differentiate(hermite::shift(e, 1), 1);
            auto rhs = hermite::shift(hermite::differentiate(e, 1), 1);
            const auto g2 = hermite::shift(e, 2);
            rhs.coeffs.resize(std::max(rhs.coeffs.size(), g2.coeffs.size()), 0.0);
            for (std::size_t m = 0; m < g2.coeffs.size(); ++m) rhs.coeffs[m] -= g2.coeffs[m];
            expect_equal(lhs, rhs);
        }
    }
}

TEST_CASE("general k,l derivative-of-shift identity with alpha coefficients") {
    std::mt19937_64 rng(777);
    auto binom = [](int n, int k) {
        double v = 1.0;
        for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
        return v;
    };
    int done = 0;
    while (done < 100) {
        const auto e = random_int_poly(rng, 12);
        const int M = e.truncation();
        std::uniform_int_distribution<int> kd(1, M);
        const int k = kd(rng);
        if (k >= M) continue;
        std::uniform_int_distribution<int> ld(1, M - k);
        const int l = ld(rng);
        ++done;

        const auto lhs = hermite::differentiate(hermite::shift(e, k), l);
        std::vector<double> rhs(lhs.coeffs.size() + 4, 0.0);
        for (int i = 0; i <= l; ++i) {
            const auto term = hermite::shift(hermite::differentiate(e, l - i), k + i);
            const double c = binom(l, i) * hermite::alpha_coeff(k, i);
            for (std::size_t m = 0; m < term.coeffs.size(); ++m) {
                if (m < rhs.size()) rhs[m] += c * term.coeffs[m];
            }
        }
        for (std::size_t m = 0; m < rhs.size(); ++m) {
            const double lv = m < lhs.coeffs.size() ? lhs.coeffs[m] : 0.0;
            CHECK(lv == rhs[m]);
        }
    }
}

TEST_CASE("norm-shift bound at the coefficient level") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto e = random_int_poly(rng, 10);
        e.coeffs[0] = 0.0;  // centered
        const auto t1 = hermite::shift(e, 1);
        CHECK(t1.l2_norm_sq() <= e.l2_norm_sq() + 1e-12);
    }
}

TEST_CASE("alpha coefficients") {
    CHECK(hermite::alpha_coeff(3, 0) == 1.0);
    CHECK(hermite::alpha_coeff(2, 1) == -2.0);
    CHECK(hermite::alpha_coeff(2, 2) == 6.0);   // (-1)^2 * 2*3
    CHECK(hermite::alpha_coeff(1, 3) == -6.0);  // (-1)^3 * 1*2*3
}

TEST_CASE("gauss_hermite_rule integrates low moments exactly") {
    std::vector<double> x, w;
    hermite::gauss_hermite_rule(20, x, w);
    double s0 = 0, s2 = 0, s4 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s0 += w[i];
        s2 += w[i] * x[i] * x[i];
        s4 += w[i] * std::pow(x[i], 4.0);
    }
    CHECK(s0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s4 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("expansion JSON serialization") {
    const auto e = hermite::expand(FunctionSpec::hermite_single(2));
    const auto j = e.to_json();
    CHECK(j.find("\"basis\":\"probabilists\"") != std::string::npos);
    CHECK(j.find("\"truncation\":2") != std::string::npos);
}
