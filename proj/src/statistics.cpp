#include "bmlab/statistics.hpp"

#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"

namespace bmlab::stats {

namespace {

template <typename Fn>
StatisticSamples yn_impl(const paths::PathBatch& b, Fn&& g) {
    StatisticSamples s;
    s.n = b.n;
    s.values.resize(b.num_paths);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(b.n));
    parallel_blocks(b.num_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const double* x = b.path(p);
            double acc = 0.0;
            for (std::size_t j = 0; j < b.n; ++j) acc += g(x[j]);
            s.values[p] = acc * inv_sqrt_n;
        }
    });
    return s;
}

}  // namespace

StatisticSamples compute_yn(const paths::PathBatch& b, const hermite::HermiteExpansion& e) {
    hermite::hermite_rank(e);  // throws NotCentered / AllBelowTolerance
    return yn_impl(b, [&](double x) { return hermite::eval_expansion(e, x); });
}

StatisticSamples compute_yn_exact(const paths::PathBatch& b, const hermite::FunctionSpec& g) {
    return yn_impl(b, [&](double x) { return g.eval(x); });
}

double sigma_n_squared(const paths::CovarianceModel& model, const hermite::HermiteExpansion& e,
                       std::size_t n) {
    const int M = e.truncation();
    std::vector<double> weights(M + 1, 0.0);  // m! c_m^2
    double fact = 1.0;
    for (int m = 0; m <= M; ++m) {
        if (m > 0) fact *= m;
        weights[m] = fact * e.coeffs[m] * e.coeffs[m];
    }
    double total = 0.0;
    for (long long k = -(static_cast<long long>(n) - 1); k < static_cast<long long>(n); ++k) {
        const double r = paths::rho(model, k);
        const double w = 1.0 - static_cast<double>(std::llabs(k)) / static_cast<double>(n);
        double rp = r;
        for (int m = 1; m <= M; ++m) {
            if (weights[m] != 0.0) total += weights[m] * w * rp;
            rp *= r;
        }
    }
    return total;
}

SigmaSquared sigma_squared(const paths::CovarianceModel& model, const hermite::HermiteExpansion& e,
                           double tail_tol) {
    if (!(tail_tol > 0.0)) throw ConfigInvalid("tail_tol must be > 0");
    const int M = e.truncation();
    std::vector<double> weights(M + 1, 0.0);
    double fact = 1.0;
    for (int m = 0; m <= M; ++m) {
        if (m > 0) fact *= m;
        weights[m] = fact * e.coeffs[m] * e.coeffs[m];
    }
    // k = 0 term.
    double total = 0.0;
    for (int m = 1; m <= M; ++m) total += weights[m];

    const long long kmax = 10'000'000;
    long long block_start = 1, block_end = 1024;
    long long used = 0;
    while (true) {
        double inc = 0.0;
        for (long long k = block_start; k <= block_end; ++k) {
            const double r = paths::rho(model, k);
            double rp = r;
            for (int m = 1; m <= M; ++m) {
                if (weights[m] != 0.0) inc += 2.0 * weights[m] * rp;
                rp *= r;
            }
        }
        total += inc;
        used = block_end;
        if (std::abs(inc) < tail_tol) break;
        if (block_end >= kmax) throw NonSummable("series not Cauchy by lag cutoff 1e7");
        block_start = block_end + 1;
        block_end = std::min(kmax, block_end * 2);
    }
    return {total, used};
}

StatisticSamples s_n_statistic(const paths::PathBatch& b, double p) {
    if (p < 1.0) throw ConfigInvalid("s_n_statistic requires p >= 1");
    return compute_yn_exact(b, hermite::FunctionSpec::abs_power(p, true));
}

MeanVar mean_and_variance(const std::vector<double>& values) {
    MeanVar mv;
    const std::size_t N = values.size();
    if (N == 0) return mv;
    double s = 0.0;
    for (double v : values) s += v;
    mv.mean = s / static_cast<double>(N);
    if (N < 2) return mv;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mv.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double Nd = static_cast<double>(N);
    mv.var = m2 / (Nd - 1.0);
    mv.se_mean = std::sqrt(mv.var / Nd);
    const double m2n = m2 / Nd, m4n = m4 / Nd;
    mv.se_var = std::sqrt(std::max(0.0, m4n - m2n * m2n) / Nd);
    return mv;
}

}  // namespace bmlab::stats
