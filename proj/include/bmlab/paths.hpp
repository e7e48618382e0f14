#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bmlab::paths {

struct CovarianceModel {
    enum class Kind { White, Fgn, PowerLaw, Table };
    Kind kind = Kind::White;
    double H = 0.5;        // Fgn
    double alpha = 1.0;    // PowerLaw: rho(k) = (1+|k|)^{-alpha}
    std::vector<double> table;  // Table: rho(0..L)

    static CovarianceModel white();
    static CovarianceModel fgn(double H);
    static CovarianceModel power_law(double alpha);
    static CovarianceModel from_table(std::vector<double> values);

    // Polynomial decay exponent alpha with rho(k) ~ k^{-alpha}, where defined.
    std::optional<double> decay_exponent() const;
    std::string describe() const;
};

double rho(const CovarianceModel& model, long long k);

struct PathBatch {
    std::vector<double> data;  // row-major, num_paths x n
    std::size_t n = 0;
    std::size_t num_paths = 0;
    CovarianceModel model;
    std::uint64_t seed = 0;
    bool used_cholesky_fallback = false;

    const double* path(std::size_t i) const { return data.data() + i * n; }
    double* path(std::size_t i) { return data.data() + i * n; }
};

inline constexpr double kEmbedEpsilon = 1e-10;

PathBatch generate(const CovarianceModel& model, std::size_t n, std::size_t num_paths,
                   std::uint64_t seed);

// Alias of generate: by self-similarity, unit-scale fGn has the same law as
// n^H-rescaled fBm increments, so no fine-grid simulation is needed.
PathBatch fbm_increments_unit_scale(const CovarianceModel& model, std::size_t n,
                                    std::size_t num_paths, std::uint64_t seed);

struct AutocovarianceEstimate {
    std::vector<double> values;  // rho_hat(0..max_lag)
    std::vector<double> ses;     // standard error across paths
};

AutocovarianceEstimate sample_autocovariance(const PathBatch& b, std::size_t max_lag);

// Partial sum of |rho(k)|^q over |k| <= n.
double abs_rho_power_sum(const CovarianceModel& model, double q, long long n);

}  // namespace bmlab::paths
