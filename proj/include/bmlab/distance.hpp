#pragma once

#include <vector>

namespace bmlab::dist {

// Standard normal CDF.
double normal_cdf(double x);

// Exact Kolmogorov-Smirnov distance of the empirical CDF to N(0,1).
double ks_distance(const std::vector<double>& samples);

// Binned total-variation estimate against N(0,1): half L1 distance of bin
// masses including the two tail cells. Biased by O(bin width).
double tv_histogram(const std::vector<double>& samples, int bins = 101, double lo = -6.0,
                    double hi = 6.0);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares of log(value) on log(n).
RateFit loglog_rate_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace bmlab::dist
