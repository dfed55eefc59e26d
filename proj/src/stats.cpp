#include "rooflinekit/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace rooflinekit {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-15;
constexpr double kTiny = 1e-300;

// Lower regularized gamma via its power series; converges fast for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma via Lentz continued fraction; for x >= a+1.
double gamma_q_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw std::domain_error("regularized_gamma_p: a must be > 0");
    if (x < 0.0) throw std::domain_error("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw std::domain_error("regularized_gamma_q: a must be > 0");
    if (x < 0.0) throw std::domain_error("regularized_gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_squared_sf(double statistic, int dof) {
    if (dof < 1) throw std::domain_error("chi_squared_sf: dof must be >= 1");
    if (statistic < 0.0) throw std::domain_error("chi_squared_sf: negative statistic");
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquaredResult chi_squared_independence(const std::vector<std::vector<double>>& table) {
    std::size_t rows = table.size();
    if (rows < 2) throw std::domain_error("chi-squared table needs at least 2 rows");
    std::size_t cols = table[0].size();
    if (cols < 2) throw std::domain_error("chi-squared table needs at least 2 columns");

    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (table[r].size() != cols) throw std::domain_error("ragged chi-squared table");
        for (std::size_t c = 0; c < cols; ++c) {
            double v = table[r][c];
            if (v < 0.0) throw std::domain_error("negative count in chi-squared table");
            row_sum[r] += v;
            col_sum[c] += v;
            total += v;
        }
    }
    for (double s : row_sum)
        if (s == 0.0) throw std::domain_error("degenerate chi-squared table: zero row sum");
    for (double s : col_sum)
        if (s == 0.0) throw std::domain_error("degenerate chi-squared table: zero column sum");

    ChiSquaredResult result;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double expected = row_sum[r] * col_sum[c] / total;
            double diff = table[r][c] - expected;
            result.statistic += diff * diff / expected;
        }
    }
    result.dof = static_cast<int>((rows - 1) * (cols - 1));
    result.p_value = chi_squared_sf(result.statistic, result.dof);
    return result;
}

} // namespace rooflinekit
