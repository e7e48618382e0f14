#include "bmlab/paths.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "bmlab/errors.hpp"
#include "bmlab/fft.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/rng.hpp"

namespace bmlab::paths {

CovarianceModel CovarianceModel::white() { return {}; }

CovarianceModel CovarianceModel::fgn(double H) {
    if (!(H > 0.0 && H < 1.0)) throw ConfigInvalid("fgn requires H in (0,1)");
    CovarianceModel m;
    m.kind = Kind::Fgn;
    m.H = H;
    return m;
}

CovarianceModel CovarianceModel::power_law(double alpha) {
    if (!(alpha > 0.0)) throw ConfigInvalid("power_law requires alpha > 0");
    CovarianceModel m;
    m.kind = Kind::PowerLaw;
    m.alpha = alpha;
    return m;
}

CovarianceModel CovarianceModel::from_table(std::vector<double> values) {
    if (values.empty() || values[0] != 1.0) throw ConfigInvalid("table must start with rho(0)=1");
    for (double v : values) {
        if (!(std::abs(v) <= 1.0)) throw ConfigInvalid("table entries must satisfy |rho| <= 1");
    }
    CovarianceModel m;
    m.kind = Kind::Table;
    m.table = std::move(values);
    return m;
}

std::optional<double> CovarianceModel::decay_exponent() const {
    switch (kind) {
        case Kind::Fgn:
            return 2.0 - 2.0 * H;
        case Kind::PowerLaw:
            return alpha;
        default:
            return std::nullopt;
    }
}

std::string CovarianceModel::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::White: os << "white"; break;
        case Kind::Fgn: os << "fgn(H=" << H << ")"; break;
        case Kind::PowerLaw: os << "power_law(alpha=" << alpha << ")"; break;
        case Kind::Table: os << "table(L=" << table.size() - 1 << ")"; break;
    }
    return os.str();
}

namespace {

double rho_fgn(double H, long long k) {
    const double a = static_cast<double>(std::llabs(k));
    if (a == 0.0) return 1.0;
    if (a < 1e4) {
        return 0.5 * (std::pow(a + 1.0, 2.0 * H) + std::pow(a - 1.0, 2.0 * H) -
                      2.0 * std::pow(a, 2.0 * H));
    }
    // Large lags: the direct formula loses precision to cancellation; use the
    // binomial series rho(k) = k^{2H} * sum_{j>=1} C(2H, 2j) k^{-2j}.
    const double t = 1.0 / a;
    double coef = 1.0;  // running C(2H, i)
    double sum = 0.0;
    double tpow = 1.0;
    for (int i = 1; i <= 8; ++i) {
        coef *= (2.0 * H - (i - 1)) / i;
        tpow *= t;
        if (i % 2 == 0) sum += coef * tpow;
    }
    return std::pow(a, 2.0 * H) * sum;
}

}  // namespace

double rho(const CovarianceModel& model, long long k) {
    const long long a = std::llabs(k);
    switch (model.kind) {
        case CovarianceModel::Kind::White:
            return a == 0 ? 1.0 : 0.0;
        case CovarianceModel::Kind::Fgn:
            return rho_fgn(model.H, a);
        case CovarianceModel::Kind::PowerLaw:
            return std::pow(1.0 + static_cast<double>(a), -model.alpha);
        case CovarianceModel::Kind::Table:
            return a < static_cast<long long>(model.table.size())
                       ? model.table[static_cast<std::size_t>(a)]
                       : 0.0;
    }
    return 0.0;
}

namespace {

PathBatch generate_cholesky(const CovarianceModel& model, std::size_t n, std::size_t num_paths,
                            std::uint64_t seed) {
    Eigen::MatrixXd R(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            R(i, j) = rho(model, static_cast<long long>(i) - static_cast<long long>(j));
        }
    }
    R.diagonal().array() += 1e-12;
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) {
        throw NotEmbeddable("covariance not positive definite even with jitter");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    PathBatch b;
    b.n = n;
    b.num_paths = num_paths;
    b.model = model;
    b.seed = seed;
    b.used_cholesky_fallback = true;
    b.data.resize(n * num_paths);
    parallel_blocks(num_paths, [&](std::size_t begin, std::size_t end) {
        Eigen::VectorXd z(n);
        for (std::size_t p = begin; p < end; ++p) {
            NormalStream gen(seed, p);
            for (std::size_t i = 0; i < n; ++i) z(i) = gen();
            Eigen::Map<Eigen::VectorXd>(b.path(p), n) = L * z;
        }
    });
    return b;
}

}  // namespace

PathBatch generate(const CovarianceModel& model, std::size_t n, std::size_t num_paths,
                   std::uint64_t seed) {
    if (n < 2) throw ConfigInvalid("generate requires n >= 2");
    if (num_paths < 1) throw ConfigInvalid("generate requires num_paths >= 1");

    const std::size_t L = 2 * (n - 1);
    std::vector<double> lambda(L);
    {
        auto first_row = fft::real_buffer(L);
        for (std::size_t k = 0; k < n; ++k) first_row[k] = rho(model, static_cast<long long>(k));
        for (std::size_t k = n; k < L; ++k) first_row[k] = first_row[L - k];
        auto spec = fft::complex_buffer(L / 2 + 1);
        const auto& plan = fft::plan_for_length(L);
        plan.forward(first_row.get(), spec.get());
        // Symmetric real input: the spectrum is real; mirror the half-spectrum
        // back to a full eigenvalue list.
        for (std::size_t j = 0; j <= L / 2; ++j) lambda[j] = spec[j][0];
        for (std::size_t j = L / 2 + 1; j < L; ++j) lambda[j] = lambda[L - j];
    }
    bool embeddable = true;
    for (double& lv : lambda) {
        if (lv < -kEmbedEpsilon) {
            embeddable = false;
            break;
        }
        if (lv < 0.0) lv = 0.0;
    }
    if (!embeddable) {
        if (n <= 2048) return generate_cholesky(model, n, num_paths, seed);
        throw NotEmbeddable("circulant eigenvalue below -epsilon and n too large for Cholesky");
    }

    const std::size_t M = L / 2;
    std::vector<double> amp(M + 1);
    const double Ld = static_cast<double>(L);
    amp[0] = std::sqrt(lambda[0] / Ld);
    amp[M] = std::sqrt(lambda[M] / Ld);
    for (std::size_t j = 1; j < M; ++j) amp[j] = std::sqrt(lambda[j] / (2.0 * Ld));

    PathBatch b;
    b.n = n;
    b.num_paths = num_paths;
    b.model = model;
    b.seed = seed;
    b.data.resize(n * num_paths);

    const auto& plan = fft::plan_for_length(L);
    parallel_blocks(num_paths, [&](std::size_t begin, std::size_t end) {
        auto spec = fft::complex_buffer(M + 1);
        auto out = fft::real_buffer(L);
        for (std::size_t p = begin; p < end; ++p) {
            NormalStream gen(seed, p);
            spec[0][0] = amp[0] * gen();
            spec[0][1] = 0.0;
            spec[M][0] = amp[M] * gen();
            spec[M][1] = 0.0;
            for (std::size_t j = 1; j < M; ++j) {
                spec[j][0] = amp[j] * gen();
                spec[j][1] = amp[j] * gen();
            }
            plan.backward(spec.get(), out.get());
            double* dst = b.path(p);
            for (std::size_t i = 0; i < n; ++i) dst[i] = out[i];
        }
    });
    return b;
}

PathBatch fbm_increments_unit_scale(const CovarianceModel& model, std::size_t n,
                                    std::size_t num_paths, std::uint64_t seed) {
    return generate(model, n, num_paths, seed);
}

AutocovarianceEstimate sample_autocovariance(const PathBatch& b, std::size_t max_lag) {
    if (max_lag >= b.n) throw LagTooLarge("max_lag must be < n");
    AutocovarianceEstimate est;
    est.values.assign(max_lag + 1, 0.0);
    est.ses.assign(max_lag + 1, 0.0);
    std::vector<double> per_path(b.num_paths);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        for (std::size_t p = 0; p < b.num_paths; ++p) {
            const double* x = b.path(p);
            double s = 0.0;
            for (std::size_t j = 0; j + k < b.n; ++j) s += x[j] * x[j + k];
            per_path[p] = s / static_cast<double>(b.n - k);
        }
        double mean = 0.0;
        for (double v : per_path) mean += v;
        mean /= static_cast<double>(b.num_paths);
        double var = 0.0;
        for (double v : per_path) var += (v - mean) * (v - mean);
        var /= static_cast<double>(b.num_paths > 1 ? b.num_paths - 1 : 1);
        est.values[k] = mean;
        est.ses[k] = std::sqrt(var / static_cast<double>(b.num_paths));
    }
    return est;
}

double abs_rho_power_sum(const CovarianceModel& model, double q, long long n) {
    double s = 1.0;  // k = 0 term, rho(0) = 1
    for (long long k = 1; k <= n; ++k) {
        s += 2.0 * std::pow(std::abs(rho(model, k)), q);
    }
    return s;
}

}  // namespace bmlab::paths
