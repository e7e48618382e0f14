#include "bmlab/rates.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "bmlab/errors.hpp"

namespace bmlab::rates {

Smoothness smoothness_from_string(const std::string& s) {
    if (s == "D2_4") return Smoothness::D2_4;
    if (s == "D3_4") return Smoothness::D3_4;
    if (s == "D4_4") return Smoothness::D4_4;
    if (s == "D5_6") return Smoothness::D5_6;
    if (s == "D6_8") return Smoothness::D6_8;
    if (s == "D3d2_4") return Smoothness::D3d2_4;
    if (s == "hermite") return Smoothness::Hermite;
    throw ConfigInvalid("unknown smoothness tag: " + s);
}

std::string to_string(Smoothness s) {
    switch (s) {
        case Smoothness::D2_4: return "D2_4";
        case Smoothness::D3_4: return "D3_4";
        case Smoothness::D4_4: return "D4_4";
        case Smoothness::D5_6: return "D5_6";
        case Smoothness::D6_8: return "D6_8";
        case Smoothness::D3d2_4: return "D3d2_4";
        case Smoothness::Hermite: return "hermite";
    }
    return "?";
}

Smoothness smoothness_for_abs_power(double p) {
    if (p < 2.0) throw OutOfRegime("p-variation smoothness table starts at p >= 2");
    const int N = static_cast<int>(std::floor(p));
    switch (N) {
        case 2: return Smoothness::D2_4;
        case 3: return Smoothness::D3_4;
        case 4: return Smoothness::D4_4;
        case 5: return Smoothness::D5_6;
        default: return Smoothness::D6_8;
    }
}

RatePrediction predicted_rate(int d, Smoothness smoothness, double alpha) {
    if (d < 1) throw ConfigInvalid("rank d must be >= 1");
    if (!(alpha > 0.0)) throw ConfigInvalid("alpha must be > 0");
    if (!(alpha * d > 1.0)) throw OutOfRegime("summability requires alpha*d > 1");

    auto make = [](double expn, double logp, std::string why) {
        return RatePrediction{expn, logp, std::move(why), false};
    };

    if (d == 1) {
        // alpha*d > 1 already forces alpha > 1.
        return make(-0.5, 0.0, "d=1, alpha>1");
    }

    if (d == 2) {
        switch (smoothness) {
            case Smoothness::D2_4:
                if (alpha > 1.0) return make(-0.5, 0.0, "d=2 D2_4 alpha>1");
                if (alpha == 1.0) return make(-0.5, 1.5, "d=2 D2_4 alpha=1");
                if (alpha > 2.0 / 3.0) return make(1.0 - 1.5 * alpha, 0.0, "d=2 D2_4 alpha in (2/3,1)");
                throw OutOfRegime("d=2 D2_4 needs alpha > 2/3");
            case Smoothness::D3_4:
                if (alpha > 1.0) return make(-0.5, 0.0, "d=2 D3_4 alpha>1");
                if (alpha == 1.0) return make(-0.5, 1.0, "d=2 D3_4 alpha=1");
                return make(0.5 - alpha, 0.0, "d=2 D3_4 alpha in (1/2,1)");
            case Smoothness::D4_4: {
                if (alpha > 1.0) return make(-0.5, 0.0, "d=2 D4_4 alpha>1");
                if (alpha == 1.0) return make(-0.5, 0.5, "d=2 D4_4 alpha=1");
                if (alpha > 2.0 / 3.0) return make(-alpha / 2.0, 0.0, "d=2 D4_4 alpha in (2/3,1)");
                auto r = make(1.0 - 2.0 * alpha, 0.0, "d=2 D4_4 alpha in (1/2,2/3]");
                r.endpoint = (alpha == 2.0 / 3.0);
                return r;
            }
            case Smoothness::D5_6: {
                if (alpha > 1.0) return make(-0.5, 0.0, "d=2 D5_6 alpha>1");
                if (alpha == 1.0) return make(-0.5, 0.5, "d=2 D5_6 alpha=1");
                if (alpha > 0.6) return make(-alpha / 2.0, 0.0, "d=2 D5_6 alpha in (3/5,1)");
                auto r = make(1.5 - 3.0 * alpha, 0.0, "d=2 D5_6 alpha in (1/2,3/5]");
                r.endpoint = (alpha == 0.6);
                return r;
            }
            case Smoothness::D6_8:
                if (alpha > 2.0 / 3.0) return make(-0.5, 0.0, "d=2 D6_8 alpha>2/3");
                if (alpha == 2.0 / 3.0) return make(-0.5, 2.0, "d=2 D6_8 alpha=2/3");
                return make(1.5 - 3.0 * alpha, 0.0, "d=2 D6_8 alpha in (1/2,2/3)");
            default:
                throw OutOfRegime("smoothness tag not defined for d=2");
        }
    }

    // d >= 3
    const double dd = static_cast<double>(d);
    if (smoothness == Smoothness::D3d2_4) {
        if (alpha > 1.0) return make(-0.5, 0.0, "d>=3 D3d2_4 alpha>1");
        if (alpha == 1.0) return make(-0.5, 0.5, "d>=3 D3d2_4 alpha=1");
        if (alpha > 0.5) return make(-alpha / 2.0, 0.0, "d>=3 D3d2_4 alpha in (1/2,1)");
        if (alpha == 0.5) return make(-0.25, 0.5, "d>=3 D3d2_4 alpha=1/2");
        const double lo = 1.0 / (2.0 * dd - 3.0);
        if (alpha > lo) return make(0.5 - 1.5 * alpha, 0.0, "d>=3 D3d2_4 alpha in (1/(2d-3),1/2)");
        if (alpha > 1.0 / dd) {
            auto r = make(1.0 - alpha * dd, 0.0, "d>=3 D3d2_4 alpha in (1/d,1/(2d-3)]");
            r.endpoint = (alpha == lo);
            return r;
        }
        throw OutOfRegime("alpha below 1/d");
    }
    if (smoothness == Smoothness::Hermite) {
        if (alpha > 0.5) return make(-0.5, 0.0, "d>=3 hermite alpha>1/2");
        if (alpha == 0.5) return make(-0.5, 0.5, "d>=3 hermite alpha=1/2");
        const double lo = 1.0 / (dd - 1.0);
        if (alpha > lo) return make(-alpha, 0.0, "d>=3 hermite alpha in (1/(d-1),1/2)");
        if (alpha == lo) return make(-alpha, 1.0, "d>=3 hermite alpha=1/(d-1)");
        if (alpha > 1.0 / dd) return make(1.0 - alpha * dd, 0.0, "d>=3 hermite alpha in (1/d,1/(d-1))");
        throw OutOfRegime("alpha below 1/d");
    }
    throw OutOfRegime("smoothness tag not defined for d>=3");
}

double bound_value(Smoothness tag, const paths::CovarianceModel& model,
                   const hermite::HermiteExpansion& e, std::size_t n) {
    const int d = hermite::hermite_rank(e);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const long long nl = static_cast<long long>(n);
    auto s = [&](double q) { return paths::abs_rho_power_sum(model, q, nl); };

    if (d == 1) return inv_sqrt_n;
    if (d == 2) {
        switch (tag) {
            case Smoothness::D2_4: return inv_sqrt_n * std::pow(s(1.0), 1.5);
            case Smoothness::D3_4: return inv_sqrt_n * s(1.0);
            case Smoothness::D4_4:
                return inv_sqrt_n * (std::sqrt(s(1.0)) + std::pow(s(4.0 / 3.0), 1.5));
            case Smoothness::D5_6: {
                const double s32 = s(1.5);
                return inv_sqrt_n * (std::sqrt(s(1.0)) + s32 * s32);
            }
            case Smoothness::D6_8: {
                const double s32 = s(1.5);
                return inv_sqrt_n * s32 * s32;
            }
            default:
                throw RankMismatch("tag " + to_string(tag) + " does not apply to rank 2");
        }
    }
    // d >= 3
    const double sqrt_s2 = std::sqrt(s(2.0));
    if (tag == Smoothness::D3d2_4) {
        return inv_sqrt_n * (s(static_cast<double>(d - 1)) * sqrt_s2 + sqrt_s2 * std::sqrt(s(1.0)));
    }
    if (tag == Smoothness::Hermite) {
        return inv_sqrt_n * s(static_cast<double>(d - 1)) * sqrt_s2;
    }
    throw RankMismatch("tag " + to_string(tag) + " does not apply to rank >= 3");
}

InequalityTag inequality_from_string(const std::string& s) {
    if (s == "equ6") return InequalityTag::Equ6;
    if (s == "equ21") return InequalityTag::Equ21;
    if (s == "equ22") return InequalityTag::Equ22;
    if (s == "equ23") return InequalityTag::Equ23;
    if (s == "ho1") return InequalityTag::Ho1;
    if (s == "ho2") return InequalityTag::Ho2;
    if (s == "ho3") return InequalityTag::Ho3;
    throw ConfigInvalid("unknown inequality tag: " + s);
}

std::string to_string(InequalityTag t) {
    switch (t) {
        case InequalityTag::Equ6: return "equ6";
        case InequalityTag::Equ21: return "equ21";
        case InequalityTag::Equ22: return "equ22";
        case InequalityTag::Equ23: return "equ23";
        case InequalityTag::Ho1: return "ho1";
        case InequalityTag::Ho2: return "ho2";
        case InequalityTag::Ho3: return "ho3";
    }
    return "?";
}

namespace {

// |rho| lookup table over |t| <= span, indexed by t + span.
struct RhoTable {
    std::vector<double> abs_rho;
    long long span;
    explicit RhoTable(const paths::CovarianceModel& model, long long span_) : span(span_) {
        abs_rho.resize(static_cast<std::size_t>(2 * span + 1));
        for (long long t = -span; t <= span; ++t) {
            abs_rho[static_cast<std::size_t>(t + span)] = std::abs(paths::rho(model, t));
        }
    }
    double operator()(long long t) const { return abs_rho[static_cast<std::size_t>(t + span)]; }
};

// Iterate over the lattice [-n,n]^M calling fn(k).
template <typename Fn>
void for_lattice(int M, long long n, Fn&& fn) {
    std::vector<long long> k(static_cast<std::size_t>(M), -n);
    while (true) {
        fn(k);
        int i = 0;
        while (i < M && ++k[static_cast<std::size_t>(i)] > n) {
            k[static_cast<std::size_t>(i)] = -n;
            ++i;
        }
        if (i == M) break;
    }
}

double lattice_points(int M, long long n) {
    return std::pow(2.0 * static_cast<double>(n) + 1.0, M);
}

}  // namespace

std::vector<RatioRow> check_sum_inequality(InequalityTag tag, const paths::CovarianceModel& model,
                                           int M, const std::vector<long long>& n_grid) {
    if (M < 2) throw ConfigInvalid("M must be >= 2");
    if ((tag == InequalityTag::Equ22 || tag == InequalityTag::Equ23) && M < 3) {
        throw ConfigInvalid("this inequality requires M >= 3");
    }
    std::vector<RatioRow> rows;
    for (long long n : n_grid) {
        const bool needs_lattice = tag == InequalityTag::Equ6 || tag == InequalityTag::Equ21 ||
                                   tag == InequalityTag::Equ22 || tag == InequalityTag::Equ23;
        if (needs_lattice && lattice_points(M, n) > 1e8) {
            throw LatticeTooLarge("lattice exceeds 1e8 points");
        }
        const RhoTable rho_tab(model, static_cast<long long>(M) * n);
        auto s = [&](double q) { return paths::abs_rho_power_sum(model, q, n); };
        RatioRow row;
        row.n = n;
        switch (tag) {
            case InequalityTag::Equ6: {
                // v = (1,...,1)
                double lhs = 0.0;
                for_lattice(M, n, [&](const std::vector<long long>& k) {
                    long long dot = 0;
                    double prod = 1.0;
                    for (long long kj : k) {
                        dot += kj;
                        prod *= rho_tab(kj);
                    }
                    lhs += rho_tab(dot) * prod;
                });
                row.lhs = lhs;
                row.rhs = std::pow(s(1.0 + 1.0 / M), M);
                break;
            }
            case InequalityTag::Equ21: {
                // v = (1,-1,0,...,0)
                double lhs = 0.0;
                for_lattice(M, n, [&](const std::vector<long long>& k) {
                    double prod = 1.0;
                    for (long long kj : k) prod *= rho_tab(kj);
                    lhs += rho_tab(k[0] - k[1]) * prod;
                });
                row.lhs = lhs;
                row.rhs = std::pow(s(1.0), M - 1);
                break;
            }
            case InequalityTag::Equ22: {
                // v = (1,...,1) (canonical all-nonzero case); first factor is rho(k_1)^2
                double lhs = 0.0;
                for_lattice(M, n, [&](const std::vector<long long>& k) {
                    const double r1 = rho_tab(k[0]);
                    double prod = r1 * r1;
                    long long dot = k[0];
                    for (std::size_t j = 1; j < k.size(); ++j) {
                        dot += k[j];
                        prod *= rho_tab(k[j]);
                    }
                    lhs += rho_tab(dot) * prod;
                });
                row.lhs = lhs;
                row.rhs = std::pow(s(1.0), M - 2);
                break;
            }
            case InequalityTag::Equ23: {
                // v = (1,1,0,...,0), w = (0,1,1,0,...,0)
                double lhs = 0.0;
                for_lattice(M, n, [&](const std::vector<long long>& k) {
                    double prod = 1.0;
                    for (long long kj : k) prod *= rho_tab(kj);
                    lhs += rho_tab(k[0] + k[1]) * rho_tab(k[1] + k[2]) * prod;
                });
                row.lhs = lhs;
                row.rhs = std::pow(s(1.0), M - 2);
                break;
            }
            case InequalityTag::Ho1:
                row.lhs = std::pow(s(1.0 + 1.0 / M), M);
                row.rhs = s(1.0) * std::pow(s(static_cast<double>(M) / (M - 1)), M - 1);
                break;
            case InequalityTag::Ho2: {
                // Exact Hoelder constant: the counting factor is the number of
                // lattice points 2n+1, not n.
                const double s1 = s(1.0), s32 = s(1.5);
                row.lhs = s1 * s1 * s1;
                row.rhs = (2.0 * static_cast<double>(n) + 1.0) * s32 * s32;
                break;
            }
            case InequalityTag::Ho3:
                // Exact Hoelder form carries the (sum rho^2)^{1/4} factor.
                row.lhs = s(1.5);
                row.rhs = std::pow(s(4.0 / 3.0), 0.75) * std::pow(s(2.0), 0.25);
                break;
        }
        row.ratio = row.lhs / row.rhs;
        rows.push_back(row);
    }
    return rows;
}

double brascamp_lieb_check(const BoundCheckSpec& spec, const paths::CovarianceModel& model,
                           long long n) {
    const int M = spec.M;
    const std::size_t N = spec.vectors.size();
    if (M < 1 || N == 0 || spec.p.size() != N) throw ConfigInvalid("malformed BoundCheckSpec");
    for (const auto& v : spec.vectors) {
        if (static_cast<int>(v.size()) != M) throw ConfigInvalid("vector dimension != M");
        for (int c : v) {
            if (c < -1 || c > 1) throw ConfigInvalid("vector entries must be in {-1,0,1}");
        }
    }
    double psum = 0.0;
    for (double pj : spec.p) psum += pj;
    if (std::abs(psum - static_cast<double>(M)) > 1e-12) {
        throw ConditionViolated("sum of Hoelder exponents must equal M");
    }
    // Subset condition: for every subset I, sum_{j in I} p_j <= dim span{v_j}.
    for (std::size_t mask = 1; mask < (std::size_t{1} << N); ++mask) {
        Eigen::MatrixXd V(static_cast<Eigen::Index>(N), M);
        Eigen::Index rows = 0;
        double ps = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            if (mask & (std::size_t{1} << j)) {
                for (int c = 0; c < M; ++c) V(rows, c) = spec.vectors[j][static_cast<std::size_t>(c)];
                ++rows;
                ps += spec.p[j];
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(V.topRows(rows));
        if (ps > static_cast<double>(lu.rank()) + 1e-12) {
            throw ConditionViolated("subset Hoelder mass exceeds span dimension");
        }
    }
    if (lattice_points(M, n) > 1e8) throw LatticeTooLarge("lattice exceeds 1e8 points");

    const RhoTable rho_tab(model, static_cast<long long>(M) * n);
    double lhs = 0.0;
    for_lattice(M, n, [&](const std::vector<long long>& k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < N; ++j) {
            long long dot = 0;
            for (int c = 0; c < M; ++c) dot += spec.vectors[j][static_cast<std::size_t>(c)] * k[static_cast<std::size_t>(c)];
            prod *= rho_tab(dot);
        }
        lhs += prod;
    });
    double rhs = 1.0;
    const long long span = static_cast<long long>(M) * n;
    for (std::size_t j = 0; j < N; ++j) {
        double sj = 0.0;
        for (long long t = -span; t <= span; ++t) sj += std::pow(rho_tab(t), 1.0 / spec.p[j]);
        rhs *= std::pow(sj, spec.p[j]);
    }
    return lhs / rhs;
}

}  // namespace bmlab::rates
