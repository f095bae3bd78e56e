// Incomplete gamma / beta machinery: chi-square and F distribution
// functions and quantiles.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace corank {

namespace detail {

// Regularized lower incomplete gamma P(a, x) by power series;
// converges fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 2000; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued
// fraction; preferred for x >= a + 1.
inline double gamma_q_contfrac(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// Chi-square CDF with d degrees of freedom.
inline double chi2_cdf(double x, int d) {
    if (d < 1) throw std::invalid_argument("chi2_cdf: d must be positive");
    if (x < 0.0) throw std::invalid_argument("chi2_cdf: x must be nonnegative");
    return gamma_p(0.5 * d, 0.5 * x);
}

/// Chi-square quantile, Newton iteration with Wilson-Hilferty start.
inline double chi2_quantile(double p, int d) {
    if (d < 1) throw std::invalid_argument("chi2_quantile: d must be positive");
    if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("chi2_quantile: p must lie in [0, 1)");
    if (p == 0.0) return 0.0;

    // Wilson-Hilferty: chi2_d/d approx cube of a normal.
    const double dd = static_cast<double>(d);
    // Rational approximation to the normal quantile only seeds Newton;
    // the final accuracy comes from the incomplete-gamma iterations.
    const double z = [p] {
        const double q = p - 0.5;
        if (std::fabs(q) <= 0.425) {
            const double r = 0.180625 - q * q;
            return q *
                   (((59.1093747008 * r + 159.29113202) * r + 50.434271938) *
                        r +
                    3.3871327179) /
                   (((67.1875636 * r + 78.757757664) * r + 17.895169469) * r +
                    1.0);
        }
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        double v;
        if (r <= 5.0) {
            r -= 1.6;
            v = (((0.17023821103 * r + 1.3067284816) * r + 2.75681539) * r +
                 1.4234372777) /
                ((0.12021132975 * r + 0.7370016425) * r + 1.0);
        } else {
            r -= 5.0;
            v = (((0.038154081655 * r + 0.42868294337) * r + 3.081226386) * r +
                 6.657905115) /
                ((0.012258202635 * r + 0.24197894225) * r + 1.0);
        }
        return q < 0.0 ? -v : v;
    }();
    const double h = 2.0 / (9.0 * dd);
    double x = dd * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
    if (!(x > 0.0)) x = 1e-8;

    for (int it = 0; it < 100; ++it) {
        const double f = chi2_cdf(x, d) - p;
        const double logpdf = (0.5 * dd - 1.0) * std::log(x) - 0.5 * x -
                              std::lgamma(0.5 * dd) - 0.5 * dd * std::log(2.0);
        const double pdf = std::exp(logpdf);
        if (pdf <= 0.0) break;
        double step = f / pdf;
        if (std::fabs(step) > 0.5 * x) step = std::copysign(0.5 * x, step);
        x -= step;
        if (std::fabs(step) < 1e-14 * x) break;
    }
    return x;
}

/// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
inline double beta_inc(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta_inc: a, b must be positive");
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("beta_inc: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;

    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    // Symmetry keeps the continued fraction in its fast-convergence zone.
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - beta_inc(b, a, 1.0 - x);

    constexpr double tiny = 1e-300;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 2000; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return front * h / a;
}

/// F(d1, d2) distribution function.
inline double f_cdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return beta_inc(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

/// F(d1, d2) quantile by bisection on the monotone CDF.
inline double f_quantile(double p, double d1, double d2) {
    if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("f_quantile: p must lie in [0, 1)");
    if (p == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (f_cdf(hi, d1, d2) < p) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("f_quantile: no bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f_cdf(mid, d1, d2) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace corank
