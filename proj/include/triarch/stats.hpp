#pragma once
// Scalar statistics helpers. The incomplete-gamma routines use the standard
// series/continued-fraction split and are accurate to ~1e-12, which is far
// tighter than anything the chi-square reports need.

#include <cmath>
#include <cstdint>
#include <limits>

#include "triarch/error.hpp"

namespace triarch {

namespace detail {

// Regularized lower incomplete gamma P(a, x) by power series; x < a + 1.
inline double gamma_p_series(double a, double x) {
    const int max_iter = 500;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < max_iter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
    const int max_iter = 500;
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Upper-tail probability of a chi-square variate with dof degrees of freedom.
inline double chi_square_upper_tail(double statistic, std::uint32_t dof) {
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n - 1 denominator)
};

// Two-pass, summed in index order for reproducible floating-point results.
template <class Range>
MeanSd mean_sd(const Range& values) {
    std::size_t n = 0;
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        ++n;
    }
    if (n == 0) return {};
    const double mean = sum / static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

}  // namespace triarch
