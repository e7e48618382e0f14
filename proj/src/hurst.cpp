#include "bmlab/hurst.hpp"

#include <algorithm>
#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/paths.hpp"
#include "bmlab/rng.hpp"

namespace bmlab::hurst {

double power_variation(const std::vector<double>& increments, double p) {
    if (p < 1.0) throw ConfigInvalid("power_variation requires p >= 1");
    double s = 0.0;
    for (double x : increments) s += std::pow(std::abs(x), p);
    return s;
}

HurstResult estimate_hurst(const std::vector<double>& coarse, const std::vector<double>& fine,
                           double p, int lambda) {
    if (lambda < 2) throw ConfigInvalid("lambda must be an integer >= 2");
    if (fine.size() != coarse.size() * static_cast<std::size_t>(lambda)) {
        throw InconsistentRefinement("fine length must be lambda * coarse length");
    }
    for (std::size_t j = 0; j < coarse.size(); ++j) {
        double block = 0.0;
        for (int i = 0; i < lambda; ++i) block += fine[j * static_cast<std::size_t>(lambda) + i];
        if (std::abs(block - coarse[j]) > 1e-12 * std::max(1.0, std::abs(coarse[j]))) {
            throw InconsistentRefinement("coarse increments are not block sums of fine increments");
        }
    }
    const double v_coarse = power_variation(coarse, p);
    const double v_fine = power_variation(fine, p);
    if (!(v_coarse > 0.0) || !(v_fine > 0.0)) throw NonPositiveVariation("zero power variation");
    HurstResult r;
    r.lambda = lambda;
    r.p = p;
    r.n = coarse.size();
    r.t_ratio = v_fine / v_coarse;
    r.h_hat = (1.0 - std::log(r.t_ratio) / std::log(static_cast<double>(lambda))) / p;
    return r;
}

NestedPair simulate_nested_pair(double H, std::size_t n, int lambda, std::uint64_t seed,
                                std::uint64_t replication) {
    if (lambda < 2) throw ConfigInvalid("lambda must be an integer >= 2");
    const std::size_t fine_n = n * static_cast<std::size_t>(lambda);
    const auto model = paths::CovarianceModel::fgn(H);
    // One replication = one path of the per-path substream RNG; the batch
    // generator's stream index doubles as the replication index.
    paths::PathBatch b = paths::generate(model, fine_n, replication + 1, seed);
    NestedPair pair;
    pair.fine.assign(b.path(replication), b.path(replication) + fine_n);
    const double scale = std::pow(static_cast<double>(fine_n), -H);
    for (double& x : pair.fine) x *= scale;
    pair.coarse.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < lambda; ++i) s += pair.fine[j * static_cast<std::size_t>(lambda) + i];
        pair.coarse[j] = s;
    }
    return pair;
}

namespace {

// Generate all replications for one n in a single batch so path substreams
// are indexed by replication.
std::vector<double> h_hats_for_n(double H, double p, int lambda, std::size_t n, std::size_t reps,
                                 std::uint64_t seed) {
    const std::size_t fine_n = n * static_cast<std::size_t>(lambda);
    const auto model = paths::CovarianceModel::fgn(H);
    paths::PathBatch b = paths::generate(model, fine_n, reps, seed);
    const double scale = std::pow(static_cast<double>(fine_n), -H);
    std::vector<double> h(reps);
    parallel_blocks(reps, [&](std::size_t begin, std::size_t end) {
        std::vector<double> fine(fine_n), coarse(n);
        for (std::size_t r = begin; r < end; ++r) {
            const double* x = b.path(r);
            for (std::size_t j = 0; j < fine_n; ++j) fine[j] = x[j] * scale;
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (int i = 0; i < lambda; ++i) s += fine[j * static_cast<std::size_t>(lambda) + i];
                coarse[j] = s;
            }
            h[r] = estimate_hurst(coarse, fine, p, lambda).h_hat;
        }
    });
    return h;
}

}  // namespace

ConsistencyTable consistency_experiment(double H, double p, int lambda,
                                        const std::vector<std::size_t>& n_grid, std::size_t reps,
                                        std::uint64_t seed) {
    if (reps < 2) throw ConfigInvalid("need >= 2 replications");
    ConsistencyTable table;
    table.out_of_theorem = (H >= 0.75) || !(p == 2.0 || p >= 3.0);
    for (std::size_t n : n_grid) {
        const auto h = h_hats_for_n(H, p, lambda, n, reps, seed);
        ConsistencyRow row;
        row.n = n;
        const double norm = std::sqrt(static_cast<double>(n) / std::log(static_cast<double>(n)));
        std::vector<double> abs_stat(reps);
        double sum = 0.0, sum_h = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double stat = norm * (h[r] - H);
            sum += stat;
            sum_h += h[r];
            abs_stat[r] = std::abs(stat);
        }
        row.mean_stat = sum / static_cast<double>(reps);
        row.mean_h_hat = sum_h / static_cast<double>(reps);
        double ss = 0.0;
        for (double hv : h) ss += (hv - row.mean_h_hat) * (hv - row.mean_h_hat);
        row.sd_h_hat = std::sqrt(ss / static_cast<double>(reps - 1));
        std::sort(abs_stat.begin(), abs_stat.end());
        const std::size_t idx =
            std::min(reps - 1, static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(reps))) - 1);
        row.q90_abs_stat = abs_stat[idx];
        table.rows.push_back(row);
    }
    table.q90_decreasing = table.rows.size() >= 2;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (!(table.rows[i].q90_abs_stat < table.rows[i - 1].q90_abs_stat)) {
            table.q90_decreasing = false;
        }
    }
    return table;
}

}  // namespace bmlab::hurst
