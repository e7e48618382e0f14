#pragma once

#include <cstdint>
#include <vector>

namespace bmlab::hurst {

struct HurstResult {
    double h_hat = 0.0;
    int lambda = 2;
    double p = 2.0;
    std::size_t n = 0;
    double t_ratio = 0.0;
};

double power_variation(const std::vector<double>& increments, double p);

// Ratio estimator from one underlying path observed at resolutions 1/n and
// 1/(lambda n); the coarse increments must be block sums of the fine ones.
HurstResult estimate_hurst(const std::vector<double>& coarse, const std::vector<double>& fine,
                           double p, int lambda);

struct NestedPair {
    std::vector<double> coarse;  // length n
    std::vector<double> fine;    // length lambda*n
};

// Fine-resolution fBm increments of length lambda*n scaled by (lambda*n)^{-H};
// coarse increments are sums of lambda consecutive fine ones.
NestedPair simulate_nested_pair(double H, std::size_t n, int lambda, std::uint64_t seed,
                                std::uint64_t replication);

struct ConsistencyRow {
    std::size_t n = 0;
    double mean_stat = 0.0;      // mean of sqrt(n/log n)(H_hat - H)
    double q90_abs_stat = 0.0;   // 0.9-quantile of |stat|
    double mean_h_hat = 0.0;
    double sd_h_hat = 0.0;
};

struct ConsistencyTable {
    std::vector<ConsistencyRow> rows;
    bool q90_decreasing = false;
    bool out_of_theorem = false;  // H >= 3/4 or p outside {2} U [3,inf)
};

ConsistencyTable consistency_experiment(double H, double p, int lambda,
                                        const std::vector<std::size_t>& n_grid, std::size_t reps,
                                        std::uint64_t seed);

}  // namespace bmlab::hurst
