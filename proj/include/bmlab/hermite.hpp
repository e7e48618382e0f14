#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bmlab::hermite {

// Truncated expansion g(x) = sum_{m=0}^{M} coeffs[m] * H_m(x) in the
// probabilists' Hermite basis.
struct HermiteExpansion {
    std::vector<double> coeffs;  // c_0 .. c_M
    std::optional<int> rank_hint;

    int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
    double l2_norm_sq() const;  // sum m! c_m^2
    std::string to_json() const;
};

struct FunctionSpec {
    enum class Kind { HermiteSingle, AbsPower, Polynomial, ExplicitHermite };
    Kind kind;
    int m = 0;                    // HermiteSingle order
    double p = 0.0;               // AbsPower exponent (>= 1)
    bool centered = true;         // AbsPower: subtract E|Z|^p
    std::vector<double> coeffs;   // Polynomial (monomial basis) or ExplicitHermite

    static FunctionSpec hermite_single(int m);
    static FunctionSpec abs_power(double p, bool centered = true);
    static FunctionSpec polynomial(std::vector<double> monomial_coeffs);
    static FunctionSpec explicit_hermite(std::vector<double> hermite_coeffs);

    // Direct pointwise evaluation of the exact function (not a truncation).
    double eval(double x) const;
    // Number of derivatives available in the relevant smoothness scale;
    // -1 means unlimited (polynomials).
    int derivative_order() const;
};

double hermite_eval(int m, double x);

HermiteExpansion expand(const FunctionSpec& g, int M, int quad_nodes);
HermiteExpansion expand(const FunctionSpec& g);  // M=40, nodes=200 for abs_power; exact otherwise

int hermite_rank(const HermiteExpansion& e, double tol = 1e-8);

HermiteExpansion shift(const HermiteExpansion& e, int k);

HermiteExpansion differentiate(const HermiteExpansion& e, int l);

double abs_moment(double p);

double eval_expansion(const HermiteExpansion& e, double x);

// alpha_{k,i} = (-1)^i k(k+1)...(k+i-1), with alpha_{k,0} = 1.
double alpha_coeff(int k, int i);

// Gauss-Hermite rule for the standard Gaussian measure: integral of f w.r.t.
// gamma is approximated by sum w[i] * f(x[i]).
void gauss_hermite_rule(int nodes, std::vector<double>& x, std::vector<double>& w);

}  // namespace bmlab::hermite
