#pragma once

#include <optional>
#include <vector>

#include "bmlab/hermite.hpp"
#include "bmlab/paths.hpp"

namespace bmlab::stein {

inline constexpr std::size_t kQuadCap = 4096;  // factorized triple-sum evaluator
inline constexpr std::size_t kCubicCap = 64;   // brute-force reference evaluator

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// <DY_n, u_n> = (1/n) sum_{l1,l2} g_1(X_{l1}) g'(X_{l2}) rho(l1-l2),
// literal O(n^2) evaluation. Rank-1 g: identically sigma_n^2, returned exactly.
double d_u_yn(const double* path, std::size_t n, const hermite::HermiteExpansion& e,
              const paths::CovarianceModel& model);

// Second-order functional
// n^{-3/2} sum_{l1,l2,l3} [ g_1'(X_{l1}) g'(X_{l2}) g_1(X_{l3}) rho_12 rho_13
//                         + g_1(X_{l1}) g''(X_{l2}) g_1(X_{l3}) rho_12 rho_23 ],
// factorized through the covariance matvecs v = R g_1(X), w = R g'(X); O(n^2).
double d_u2_yn(const double* path, std::size_t n, const hermite::HermiteExpansion& e,
               const paths::CovarianceModel& model);

// Direct O(n^3) triple sum for cross-checking; capped at kCubicCap.
double d_u2_yn_reference(const double* path, std::size_t n, const hermite::HermiteExpansion& e,
                         const paths::CovarianceModel& model);

struct BatchFunctionals {
    std::vector<double> du;   // one <DY_n,u_n> per path
    std::vector<double> du2;  // one second-order value per path
};

// Whole-batch evaluation with FFT-accelerated covariance matvecs; numerically
// cross-checked against the direct forms in the test suite.
BatchFunctionals evaluate_batch(const paths::PathBatch& b, const hermite::HermiteExpansion& e,
                                bool want_du2 = true);

Estimate tv_upper_prop31(const std::vector<double>& du_samples, double sigma_n);

Estimate tv_upper_prop33(const std::vector<double>& du_samples,
                         const std::vector<double>& du2_samples, double sigma_n);

Estimate third_moment(const std::vector<double>& yn_samples, double sigma_n);

struct FourthCumulant {
    double kappa4 = 0.0;
    double se = 0.0;
    std::optional<double> chaos_bound;  // 2 sqrt(((q-1)/(3q)) max(kappa4,0)) for single-chaos g
    bool single_chaos = false;
};

FourthCumulant fourth_cumulant(const std::vector<double>& yn_samples, double sigma_n,
                               const hermite::HermiteExpansion& e);

}  // namespace bmlab::stein
