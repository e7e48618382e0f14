#include "bmlab/distance.hpp"

#include <algorithm>
#include <cmath>

#include "bmlab/errors.hpp"

namespace bmlab::dist {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double ks_distance(const std::vector<double>& samples) {
    if (samples.empty()) throw ConfigInvalid("ks_distance needs >= 1 sample");
    std::vector<double> z = samples;
    std::sort(z.begin(), z.end());
    const double m = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = normal_cdf(z[i]);
        d = std::max(d, static_cast<double>(i + 1) / m - cdf);
        d = std::max(d, cdf - static_cast<double>(i) / m);
    }
    return d;
}

double tv_histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
    if (bins < 2) throw ConfigInvalid("tv_histogram needs >= 2 bins");
    if (!(lo < hi)) throw EmptyRange("histogram range is empty");
    if (samples.empty()) throw ConfigInvalid("tv_histogram needs >= 1 sample");
    std::vector<double> counts(static_cast<std::size_t>(bins) + 2, 0.0);  // [tail_lo, bins..., tail_hi]
    const double width = (hi - lo) / bins;
    for (double x : samples) {
        if (x < lo) {
            counts.front() += 1.0;
        } else if (x >= hi) {
            counts.back() += 1.0;
        } else {
            auto idx = static_cast<std::size_t>((x - lo) / width);
            idx = std::min<std::size_t>(idx, static_cast<std::size_t>(bins) - 1);
            counts[idx + 1] += 1.0;
        }
    }
    const double m = static_cast<double>(samples.size());
    double tv = std::abs(counts.front() / m - normal_cdf(lo));
    for (int b = 0; b < bins; ++b) {
        const double q = normal_cdf(lo + (b + 1) * width) - normal_cdf(lo + b * width);
        tv += std::abs(counts[static_cast<std::size_t>(b) + 1] / m - q);
    }
    tv += std::abs(counts.back() / m - (1.0 - normal_cdf(hi)));
    return 0.5 * tv;
}

RateFit loglog_rate_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw ConfigInvalid("rate fit needs >= 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double N = static_cast<double>(points.size());
    for (const auto& [n, v] : points) {
        if (!(v > 0.0) || !(n > 0.0)) throw NonPositiveValue("rate fit requires positive values");
        const double x = std::log(n), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = N * sxx - sx * sx;
    RateFit fit;
    fit.slope = (N * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / N;
    const double ss_tot = syy - sy * sy / N;
    const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / N);
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace bmlab::dist
