#pragma once

#include <vector>

namespace rooflinekit {

// Regularized incomplete gamma functions. P(a,x) + Q(a,x) = 1. Series
// expansion below x < a+1, continued fraction above; relative accuracy is
// ~1e-14 in the ranges used here (a = dof/2 with small dof).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-squared distribution with `dof` degrees of freedom.
double chi_squared_sf(double statistic, int dof);

struct ChiSquaredResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson chi-squared test of independence on an r x c contingency table,
// expected counts from the marginals, no continuity correction. Throws
// std::domain_error if any row or column sum is zero or the table is
// smaller than 2x2.
ChiSquaredResult chi_squared_independence(const std::vector<std::vector<double>>& table);

} // namespace rooflinekit
