#include "bmlab/hermite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "bmlab/errors.hpp"

namespace bmlab::hermite {

double HermiteExpansion::l2_norm_sq() const {
    double s = 0.0, fact = 1.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        if (m > 0) fact *= static_cast<double>(m);
        s += fact * coeffs[m] * coeffs[m];
    }
    return s;
}

std::string HermiteExpansion::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"basis\":\"probabilists\",\"coeffs\":[";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i) os << ",";
        os << coeffs[i];
    }
    os << "],\"truncation\":" << truncation() << "}";
    return os.str();
}

FunctionSpec FunctionSpec::hermite_single(int m) {
    FunctionSpec f;
    f.kind = Kind::HermiteSingle;
    f.m = m;
    return f;
}

FunctionSpec FunctionSpec::abs_power(double p, bool centered) {
    if (p < 1.0) throw ConfigInvalid("abs_power requires p >= 1");
    FunctionSpec f;
    f.kind = Kind::AbsPower;
    f.p = p;
    f.centered = centered;
    return f;
}

FunctionSpec FunctionSpec::polynomial(std::vector<double> monomial_coeffs) {
    FunctionSpec f;
    f.kind = Kind::Polynomial;
    f.coeffs = std::move(monomial_coeffs);
    return f;
}

FunctionSpec FunctionSpec::explicit_hermite(std::vector<double> hermite_coeffs) {
    FunctionSpec f;
    f.kind = Kind::ExplicitHermite;
    f.coeffs = std::move(hermite_coeffs);
    return f;
}

double FunctionSpec::eval(double x) const {
    switch (kind) {
        case Kind::HermiteSingle:
            return hermite_eval(m, x);
        case Kind::AbsPower:
            return std::pow(std::abs(x), p) - (centered ? abs_moment(p) : 0.0);
        case Kind::Polynomial: {
            double v = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
            return v;
        }
        case Kind::ExplicitHermite: {
            HermiteExpansion e{coeffs, std::nullopt};
            return eval_expansion(e, x);
        }
    }
    return 0.0;
}

int FunctionSpec::derivative_order() const {
    if (kind != Kind::AbsPower) return -1;
    // |x|^p has floor(p) classical derivatives unless p is an even integer,
    // in which case the function is a polynomial.
    double ip;
    if (std::modf(p / 2.0, &ip) == 0.0) return -1;
    return static_cast<int>(std::floor(p));
}

double hermite_eval(int m, double x) {
    double hm1 = 0.0, h = 1.0;  // H_{-1}, H_0
    for (int j = 0; j < m; ++j) {
        const double next = x * h - static_cast<double>(j) * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

double abs_moment(double p) {
    if (p < 0.0) throw ConfigInvalid("abs_moment requires p >= 0");
    return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(M_PI);
}

void gauss_hermite_rule(int nodes, std::vector<double>& x, std::vector<double>& w) {
    // Golub-Welsch on the physicists' weight exp(-t^2); convert to the
    // standard Gaussian measure by x = sqrt(2) t, w = w_phys / sqrt(pi).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int k = 1; k < nodes; ++k) {
        const double b = std::sqrt(static_cast<double>(k) / 2.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x.resize(nodes);
    w.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        x[i] = std::sqrt(2.0) * es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        w[i] = v0 * v0;  // mu_0 = sqrt(pi) cancels against the 1/sqrt(pi) conversion
    }
}

namespace {

// Multiply a Hermite-basis coefficient vector by x, using
// x H_m = H_{m+1} + m H_{m-1}.
std::vector<double> hermite_times_x(const std::vector<double>& c) {
    std::vector<double> out(c.size() + 1, 0.0);
    for (std::size_t m = 0; m < c.size(); ++m) {
        out[m + 1] += c[m];
        if (m >= 1) out[m - 1] += static_cast<double>(m) * c[m];
    }
    return out;
}

std::vector<double> monomial_to_hermite(const std::vector<double>& a) {
    std::vector<double> h{0.0};
    for (std::size_t i = a.size(); i-- > 0;) {
        h = hermite_times_x(h);
        h[0] += a[i];
    }
    if (h.empty()) h.push_back(0.0);
    return h;
}

std::vector<double> pad_or_trim(std::vector<double> c, int M) {
    c.resize(static_cast<std::size_t>(M) + 1, 0.0);
    return c;
}

}  // namespace

HermiteExpansion expand(const FunctionSpec& g, int M, int quad_nodes) {
    if (M < 0) throw ConfigInvalid("truncation M must be >= 0");
    switch (g.kind) {
        case FunctionSpec::Kind::HermiteSingle: {
            std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
            if (g.m <= M) c[g.m] = 1.0;
            return {c, g.m >= 1 ? std::optional<int>(g.m) : std::nullopt};
        }
        case FunctionSpec::Kind::Polynomial:
            return {pad_or_trim(monomial_to_hermite(g.coeffs), M), std::nullopt};
        case FunctionSpec::Kind::ExplicitHermite:
            return {pad_or_trim(g.coeffs, M), std::nullopt};
        case FunctionSpec::Kind::AbsPower:
            break;
    }
    if (quad_nodes < M + 1) throw ConfigInvalid("quad_nodes must be >= M+1");
    std::vector<double> x, w;
    gauss_hermite_rule(quad_nodes, x, w);
    std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
    // Accumulate with the orthonormal polynomials He_m / sqrt(m!) for
    // numerical range, then rescale: c_m = <g, He_m>/m!.
    std::vector<double> hnorm(static_cast<std::size_t>(M) + 1);
    for (int i = 0; i < quad_nodes; ++i) {
        const double gi = g.eval(x[i]);
        double hm1 = 0.0, h = 1.0;
        for (int m = 0; m <= M; ++m) {
            hnorm[m] = h;
            const double next = (x[i] * h - std::sqrt(static_cast<double>(m)) * hm1) /
                                std::sqrt(static_cast<double>(m + 1));
            hm1 = h;
            h = next;
        }
        for (int m = 0; m <= M; ++m) c[m] += w[i] * gi * hnorm[m];
    }
    double sqrt_fact = 1.0;
    for (int m = 0; m <= M; ++m) {
        if (m > 0) sqrt_fact *= std::sqrt(static_cast<double>(m));
        c[m] /= sqrt_fact;
        if (!std::isfinite(c[m])) throw NonIntegrable("quadrature sum diverged");
        // |x|^p is even; odd coefficients are structurally zero.
        if (m % 2 == 1) c[m] = 0.0;
    }
    // Centering is exact by construction; keep quadrature noise out of c_0 so
    // that rank detection sees a genuinely centered expansion.
    if (g.centered) c[0] = 0.0;
    // The true coefficients decay, so the variance contributions m!*c_m^2
    // decrease in m. Once the quadrature noise floor takes over, c_m stops
    // decaying and the factorial weight amplifies the noise without bound.
    // Zero the tail from the first trend break onward.
    {
        double fact = 1.0, prev = 0.0;
        bool seen_decrease = false, cut = false;
        for (int m = 0; m <= M; ++m) {
            if (m > 0) fact *= m;
            const double term = fact * c[m] * c[m];
            if (cut) {
                c[m] = 0.0;
                continue;
            }
            if (term == 0.0) continue;
            if (prev != 0.0 && term < prev) seen_decrease = true;
            if (seen_decrease && term > prev) {
                cut = true;
                c[m] = 0.0;
                continue;
            }
            prev = term;
        }
    }
    return {c, 2};
}

HermiteExpansion expand(const FunctionSpec& g) {
    if (g.kind == FunctionSpec::Kind::AbsPower) return expand(g, 40, 200);
    const int deg = static_cast<int>(g.coeffs.size()) - 1;
    switch (g.kind) {
        case FunctionSpec::Kind::HermiteSingle:
            return expand(g, g.m, g.m + 1);
        case FunctionSpec::Kind::Polynomial:
        case FunctionSpec::Kind::ExplicitHermite:
            return expand(g, std::max(deg, 0), std::max(deg, 0) + 1);
        default:
            return expand(g, 40, 200);
    }
}

int hermite_rank(const HermiteExpansion& e, double tol) {
    if (tol <= 0.0) throw ConfigInvalid("rank tolerance must be > 0");
    double cmax = 0.0;
    for (double c : e.coeffs) cmax = std::max(cmax, std::abs(c));
    const double abs_tol = tol * std::max(cmax, 1.0);
    if (e.coeffs.empty() || cmax <= abs_tol) throw AllBelowTolerance("all coefficients below tolerance");
    if (std::abs(e.coeffs[0]) > abs_tol) throw NotCentered("c_0 exceeds tolerance");
    for (std::size_t m = 1; m < e.coeffs.size(); ++m) {
        if (std::abs(e.coeffs[m]) > abs_tol) return static_cast<int>(m);
    }
    throw AllBelowTolerance("no coefficient above tolerance beyond c_0");
}

HermiteExpansion shift(const HermiteExpansion& e, int k) {
    if (k < 0 || k > e.truncation()) throw ShiftExceedsTruncation("shift order exceeds truncation");
    std::vector<double> c(e.coeffs.begin() + k, e.coeffs.end());
    return {std::move(c), std::nullopt};
}

HermiteExpansion differentiate(const HermiteExpansion& e, int l) {
    if (l < 0 || l > e.truncation()) throw ConfigInvalid("derivative order out of range");
    std::vector<double> c = e.coeffs;
    for (int pass = 0; pass < l; ++pass) {
        for (std::size_t m = 0; m + 1 < c.size(); ++m) {
            c[m] = static_cast<double>(m + 1) * c[m + 1];
        }
        c.pop_back();
    }
    if (c.empty()) c.push_back(0.0);
    return {std::move(c), std::nullopt};
}

double eval_expansion(const HermiteExpansion& e, double x) {
    // Clenshaw backward recurrence for the three-term rule
    // H_{m+1} = x H_m - m H_{m-1}.
    double b1 = 0.0, b2 = 0.0;
    for (int m = e.truncation(); m >= 0; --m) {
        const double b = e.coeffs[m] + x * b1 - static_cast<double>(m + 1) * b2;
        b2 = b1;
        b1 = b;
    }
    return b1;
}

double alpha_coeff(int k, int i) {
    double v = 1.0;
    for (int j = 0; j < i; ++j) v *= static_cast<double>(k + j);
    return (i % 2 == 0) ? v : -v;
}

}  // namespace bmlab::hermite
