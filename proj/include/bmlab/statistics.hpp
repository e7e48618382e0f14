#pragma once

#include <vector>

#include "bmlab/hermite.hpp"
#include "bmlab/paths.hpp"

namespace bmlab::stats {

struct StatisticSamples {
    std::vector<double> values;  // one Y_n per path
    std::size_t n = 0;
    bool normalized = false;  // divided by sigma_n or not
};

// Y_n = n^{-1/2} sum_j g(X_j), with g given by its Hermite expansion.
StatisticSamples compute_yn(const paths::PathBatch& b, const hermite::HermiteExpansion& e);

// Same statistic evaluated with the exact function (used for abs_power, where
// the truncated expansion would add bias to the statistic itself).
StatisticSamples compute_yn_exact(const paths::PathBatch& b, const hermite::FunctionSpec& g);

// Exact finite-n variance: sum_m m! c_m^2 sum_{|k|<n} (1-|k|/n) rho(k)^m.
double sigma_n_squared(const paths::CovarianceModel& model, const hermite::HermiteExpansion& e,
                       std::size_t n);

struct SigmaSquared {
    double value = 0.0;
    long long cutoff = 0;  // lag cutoff K actually used
};

// Limiting variance sum_m m! c_m^2 sum_{k in Z} rho(k)^m, truncated adaptively.
SigmaSquared sigma_squared(const paths::CovarianceModel& model, const hermite::HermiteExpansion& e,
                           double tail_tol);

// S_n = sqrt(n) ((1/n) sum_j |X_j|^p - c_p) on a unit-scale fGn batch.
StatisticSamples s_n_statistic(const paths::PathBatch& b, double p);

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
};

MeanVar mean_and_variance(const std::vector<double>& values);

}  // namespace bmlab::stats
