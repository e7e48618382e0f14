#include "bmlab/stein.hpp"

#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/fft.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/statistics.hpp"

namespace bmlab::stein {

namespace {

// g with only the first Hermite coefficient: <DY_n,u_n> is deterministic and
// the second-order functional vanishes identically.
bool pure_first_order(const hermite::HermiteExpansion& e) {
    for (std::size_t m = 0; m < e.coeffs.size(); ++m) {
        if (m != 1 && e.coeffs[m] != 0.0) return false;
    }
    return e.coeffs.size() > 1 && e.coeffs[1] != 0.0;
}

std::vector<double> rho_lags(const paths::CovarianceModel& model, std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = paths::rho(model, static_cast<long long>(k));
    return r;
}

// Dense Toeplitz matvec: out_l = sum_j in_j rho(l-j).
void toeplitz_matvec(const std::vector<double>& r, const double* in, double* out, std::size_t n) {
    for (std::size_t l = 0; l < n; ++l) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = l > j ? l - j : j - l;
            s += in[j] * r[k];
        }
        out[l] = s;
    }
}

struct Evaluated {
    std::vector<double> g1, gd, g1d, gdd;
};

Evaluated eval_arrays(const double* x, std::size_t n, const hermite::HermiteExpansion& e,
                      bool second_order) {
    const auto e_g1 = hermite::shift(e, 1);
    const auto e_gd = hermite::differentiate(e, 1);
    Evaluated v;
    v.g1.resize(n);
    v.gd.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        v.g1[j] = hermite::eval_expansion(e_g1, x[j]);
        v.gd[j] = hermite::eval_expansion(e_gd, x[j]);
    }
    if (second_order) {
        const auto e_g1d = hermite::differentiate(e_g1, 1);
        const auto e_gdd = hermite::differentiate(e, 2);
        v.g1d.resize(n);
        v.gdd.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            v.g1d[j] = hermite::eval_expansion(e_g1d, x[j]);
            v.gdd[j] = hermite::eval_expansion(e_gdd, x[j]);
        }
    }
    return v;
}

}  // namespace

double d_u_yn(const double* path, std::size_t n, const hermite::HermiteExpansion& e,
              const paths::CovarianceModel& model) {
    if (pure_first_order(e)) return stats::sigma_n_squared(model, e, n);
    const auto r = rho_lags(model, n);
    const auto a = eval_arrays(path, n, e, false);
    std::vector<double> w(n);
    toeplitz_matvec(r, a.gd.data(), w.data(), n);
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += a.g1[l] * w[l];
    return s / static_cast<double>(n);
}

double d_u2_yn(const double* path, std::size_t n, const hermite::HermiteExpansion& e,
               const paths::CovarianceModel& model) {
    if (n > kQuadCap) throw CapExceeded("n exceeds factorized-evaluator cap");
    if (pure_first_order(e)) return 0.0;
    const auto r = rho_lags(model, n);
    const auto a = eval_arrays(path, n, e, true);
    std::vector<double> v(n), w(n);
    toeplitz_matvec(r, a.g1.data(), v.data(), n);
    toeplitz_matvec(r, a.gd.data(), w.data(), n);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        s1 += a.g1d[l] * w[l] * v[l];
        s2 += a.gdd[l] * v[l] * v[l];
    }
    return (s1 + s2) / std::pow(static_cast<double>(n), 1.5);
}

double d_u2_yn_reference(const double* path, std::size_t n, const hermite::HermiteExpansion& e,
                         const paths::CovarianceModel& model) {
    if (n > kCubicCap) throw CapExceeded("n exceeds brute-force cap");
    const auto r = rho_lags(model, n);
    const auto a = eval_arrays(path, n, e, true);
    auto rr = [&](std::size_t i, std::size_t j) { return r[i > j ? i - j : j - i]; };
    double s = 0.0;
    for (std::size_t l1 = 0; l1 < n; ++l1) {
        for (std::size_t l2 = 0; l2 < n; ++l2) {
            const double r12 = rr(l1, l2);
            for (std::size_t l3 = 0; l3 < n; ++l3) {
                s += a.g1d[l1] * a.gd[l2] * a.g1[l3] * r12 * rr(l1, l3);
                s += a.g1[l1] * a.gdd[l2] * a.g1[l3] * r12 * rr(l2, l3);
            }
        }
    }
    return s / std::pow(static_cast<double>(n), 1.5);
}

BatchFunctionals evaluate_batch(const paths::PathBatch& b, const hermite::HermiteExpansion& e,
                                bool want_du2) {
    const std::size_t n = b.n;
    if (want_du2 && n > kQuadCap) throw CapExceeded("n exceeds factorized-evaluator cap");
    BatchFunctionals out;
    out.du.assign(b.num_paths, 0.0);
    if (want_du2) out.du2.assign(b.num_paths, 0.0);

    if (pure_first_order(e)) {
        const double s2 = stats::sigma_n_squared(b.model, e, n);
        for (auto& v : out.du) v = s2;
        return out;
    }

    // Circulant embedding of the covariance Toeplitz matrix for FFT matvecs.
    const std::size_t L = 2 * n;
    const auto& plan = fft::plan_for_length(L);
    std::vector<double> kernel_spec(plan.spectrum_size());
    {
        auto c = fft::real_buffer(L);
        auto spec = fft::complex_buffer(plan.spectrum_size());
        c[0] = 1.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double r = paths::rho(b.model, static_cast<long long>(k));
            c[k] = r;
            c[L - k] = r;
        }
        c[n] = 0.0;
        plan.forward(c.get(), spec.get());
        for (std::size_t j = 0; j < kernel_spec.size(); ++j) kernel_spec[j] = spec[j][0];
    }

    const auto e_g1 = hermite::shift(e, 1);
    const auto e_gd = hermite::differentiate(e, 1);
    const auto e_g1d = hermite::differentiate(e_g1, 1);
    const auto e_gdd = hermite::differentiate(e, 2);
    const double n_d = static_cast<double>(n);
    const double inv_L = 1.0 / static_cast<double>(L);

    parallel_blocks(b.num_paths, [&](std::size_t begin, std::size_t end) {
        auto buf = fft::real_buffer(L);
        auto spec = fft::complex_buffer(plan.spectrum_size());
        std::vector<double> g1(n), gd(n), v(n), w(n);
        auto matvec = [&](const std::vector<double>& in, std::vector<double>& res) {
            for (std::size_t j = 0; j < n; ++j) buf[j] = in[j];
            for (std::size_t j = n; j < L; ++j) buf[j] = 0.0;
            plan.forward(buf.get(), spec.get());
            for (std::size_t j = 0; j < kernel_spec.size(); ++j) {
                spec[j][0] *= kernel_spec[j];
                spec[j][1] *= kernel_spec[j];
            }
            plan.backward(spec.get(), buf.get());
            for (std::size_t j = 0; j < n; ++j) res[j] = buf[j] * inv_L;
        };
        for (std::size_t p = begin; p < end; ++p) {
            const double* x = b.path(p);
            for (std::size_t j = 0; j < n; ++j) {
                g1[j] = hermite::eval_expansion(e_g1, x[j]);
                gd[j] = hermite::eval_expansion(e_gd, x[j]);
            }
            matvec(gd, w);
            double du = 0.0;
            for (std::size_t j = 0; j < n; ++j) du += g1[j] * w[j];
            out.du[p] = du / n_d;
            if (want_du2) {
                matvec(g1, v);
                double s1 = 0.0, s2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    s1 += hermite::eval_expansion(e_g1d, x[j]) * w[j] * v[j];
                    s2 += hermite::eval_expansion(e_gdd, x[j]) * v[j] * v[j];
                }
                out.du2[p] = (s1 + s2) / std::pow(n_d, 1.5);
            }
        }
    });
    return out;
}

namespace {

// Jackknife SE for a statistic of the form f(S/N) built from per-sample terms.
template <typename F>
double jackknife_se(const std::vector<double>& terms, double total, F&& theta_from_mean) {
    const std::size_t N = terms.size();
    if (N < 2) return 0.0;
    std::vector<double> loo(N);
    double mean_loo = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        loo[i] = theta_from_mean((total - terms[i]) / static_cast<double>(N - 1));
        mean_loo += loo[i];
    }
    mean_loo /= static_cast<double>(N);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    return std::sqrt(ss * static_cast<double>(N - 1) / static_cast<double>(N));
}

}  // namespace

namespace {

// Rank-1 g makes <DY_n,u_n> a constant equal to sigma_n^2; the caller's
// sigma_n went through a sqrt, so allow for the last-ulp rounding of
// sigma_n * sigma_n when recognizing that degenerate case.
bool degenerate_at_sigma2(const std::vector<double>& du, double s2) {
    for (double v : du) {
        if (v != du.front()) return false;
    }
    return std::abs(du.front() - s2) <= 1e-12 * std::max(1.0, std::abs(s2));
}

}  // namespace

Estimate tv_upper_prop31(const std::vector<double>& du_samples, double sigma_n) {
    if (du_samples.size() < 2) throw ConfigInvalid("need >= 2 samples");
    if (!(sigma_n > 0.0)) throw ConfigInvalid("sigma_n must be > 0");
    const double s2 = sigma_n * sigma_n;
    if (degenerate_at_sigma2(du_samples, s2)) return {0.0, 0.0};
    const std::size_t N = du_samples.size();
    std::vector<double> q(N);
    double S = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double d = du_samples[i] - s2;
        q[i] = d * d;
        S += q[i];
    }
    const double factor = 2.0 / s2;
    Estimate est;
    est.value = factor * std::sqrt(S / static_cast<double>(N));
    if (S > 0.0) {
        est.se = jackknife_se(q, S, [&](double m) { return factor * std::sqrt(std::max(m, 0.0)); });
    }
    return est;
}

Estimate tv_upper_prop33(const std::vector<double>& du_samples,
                         const std::vector<double>& du2_samples, double sigma_n) {
    if (du_samples.size() != du2_samples.size()) throw LengthMismatch("paired samples required");
    if (du_samples.size() < 2) throw ConfigInvalid("need >= 2 samples");
    if (!(sigma_n > 0.0)) throw ConfigInvalid("sigma_n must be > 0");
    const double s2 = sigma_n * sigma_n;
    const bool degenerate = degenerate_at_sigma2(du_samples, s2);
    const std::size_t N = du_samples.size();
    const double Nd = static_cast<double>(N);
    std::vector<double> qa(N), qb(N);
    double Sa = 0.0, Sb = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double d = s2 - du_samples[i];
        qa[i] = degenerate ? 0.0 : d * d;
        qb[i] = du2_samples[i] * du2_samples[i];
        Sa += qa[i];
        Sb += qb[i];
    }
    const double ca = 8.0 / (s2 * s2);
    const double cb = std::sqrt(8.0 * M_PI) / (sigma_n * sigma_n * sigma_n);
    Estimate est;
    est.value = ca * (Sa / Nd) + cb * std::sqrt(Sb / Nd);
    if (Sa > 0.0 || Sb > 0.0) {
        // Jackknife over paired leave-one-out replicates.
        std::vector<double> loo(N);
        double mean_loo = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ma = (Sa - qa[i]) / (Nd - 1.0);
            const double mb = (Sb - qb[i]) / (Nd - 1.0);
            loo[i] = ca * ma + cb * std::sqrt(std::max(mb, 0.0));
            mean_loo += loo[i];
        }
        mean_loo /= Nd;
        double ss = 0.0;
        for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
        est.se = std::sqrt(ss * (Nd - 1.0) / Nd);
    }
    return est;
}

Estimate third_moment(const std::vector<double>& yn_samples, double sigma_n) {
    if (yn_samples.size() < 2) throw ConfigInvalid("need >= 2 samples");
    if (!(sigma_n > 0.0)) throw ConfigInvalid("sigma_n must be > 0");
    std::vector<double> cubes(yn_samples.size());
    for (std::size_t i = 0; i < yn_samples.size(); ++i) {
        const double z = yn_samples[i] / sigma_n;
        cubes[i] = z * z * z;
    }
    const auto mv = stats::mean_and_variance(cubes);
    return {std::abs(mv.mean), mv.se_mean};
}

FourthCumulant fourth_cumulant(const std::vector<double>& yn_samples, double sigma_n,
                               const hermite::HermiteExpansion& e) {
    if (yn_samples.size() < 2) throw ConfigInvalid("need >= 2 samples");
    if (!(sigma_n > 0.0)) throw ConfigInvalid("sigma_n must be > 0");
    std::vector<double> fourths(yn_samples.size());
    for (std::size_t i = 0; i < yn_samples.size(); ++i) {
        const double z = yn_samples[i] / sigma_n;
        fourths[i] = z * z * z * z;
    }
    const auto mv = stats::mean_and_variance(fourths);
    FourthCumulant fc;
    fc.kappa4 = mv.mean - 3.0;
    fc.se = mv.se_mean;
    int q = 0, nonzero = 0;
    for (std::size_t m = 1; m < e.coeffs.size(); ++m) {
        if (e.coeffs[m] != 0.0) {
            ++nonzero;
            q = static_cast<int>(m);
        }
    }
    fc.single_chaos = (nonzero == 1 && (e.coeffs.empty() || e.coeffs[0] == 0.0) && q >= 2);
    if (fc.single_chaos) {
        const double qd = static_cast<double>(q);
        fc.chaos_bound = 2.0 * std::sqrt((qd - 1.0) / (3.0 * qd) * std::max(fc.kappa4, 0.0));
    }
    return fc;
}

}  // namespace bmlab::stein
