#pragma once

#include <string>
#include <vector>

#include "bmlab/hermite.hpp"
#include "bmlab/paths.hpp"

namespace bmlab::rates {

enum class Smoothness { D2_4, D3_4, D4_4, D5_6, D6_8, D3d2_4, Hermite };

Smoothness smoothness_from_string(const std::string& s);
std::string to_string(Smoothness s);

// Smoothness class used for the p-power-variation function |x|^p - c_p:
// N <= p < N+1 gives N derivatives in the relevant scale.
Smoothness smoothness_for_abs_power(double p);

struct RatePrediction {
    double exponent = 0.0;   // rate n^exponent
    double log_power = 0.0;  // times (log n)^log_power
    std::string validity;    // parameter-region description
    bool endpoint = false;   // query sits on a published branch endpoint
};

RatePrediction predicted_rate(int d, Smoothness smoothness, double alpha);

// The n-dependent factor of the matching upper bound with all unknown
// constants set to 1, evaluated from exact partial sums of |rho|^q.
double bound_value(Smoothness tag, const paths::CovarianceModel& model,
                   const hermite::HermiteExpansion& e, std::size_t n);

enum class InequalityTag { Equ6, Equ21, Equ22, Equ23, Ho1, Ho2, Ho3 };

InequalityTag inequality_from_string(const std::string& s);
std::string to_string(InequalityTag t);

struct RatioRow {
    long long n = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

std::vector<RatioRow> check_sum_inequality(InequalityTag tag, const paths::CovarianceModel& model,
                                           int M, const std::vector<long long>& n_grid);

struct BoundCheckSpec {
    int M = 2;                              // lattice dimension
    std::vector<std::vector<int>> vectors;  // N direction vectors, entries in {-1,0,1}
    std::vector<double> p;                  // N Hoelder exponents
};

double brascamp_lieb_check(const BoundCheckSpec& spec, const paths::CovarianceModel& model,
                           long long n);

}  // namespace bmlab::rates
