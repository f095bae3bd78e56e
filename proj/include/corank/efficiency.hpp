// Asymptotic relative efficiencies against Wilks' test: the ARE ratio for
// elliptical alternatives, the Bessel-root constant c_d, the Spearman lower
// bound Omega(d1, d2), and noncentral chi-square local power curves.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/scores.hpp"
#include "corank/special_functions.hpp"

namespace corank {

/// Bessel function of the first kind by its power series,
/// B_a(x) = sum_m (-1)^m / (m! Gamma(m+a+1)) (x/2)^{2m+a},
/// in extended precision to absorb the alternating-sum cancellation.
inline double bessel_j(double order, double x) {
    if (!(order >= 0.0 && order <= 10.0))
        throw std::invalid_argument("bessel_j: order must lie in [0, 10]");
    if (!(x > 0.0 && x <= 60.0))
        throw std::invalid_argument("bessel_j: x must lie in (0, 60]");
    const long double half_x = static_cast<long double>(x) / 2.0L;
    long double term =
        std::exp(static_cast<long double>(order) * std::log(half_x) -
                 std::lgamma(static_cast<long double>(order) + 1.0L));
    long double sum = term;
    for (int m = 1; m <= 400; ++m) {
        term *= -half_x * half_x / (static_cast<long double>(m) * (m + order));
        sum += term;
        if (std::fabs(term) < 1e-20L * (std::fabs(sum) + 1e-300L) &&
            m > static_cast<int>(x))
            break;
    }
    return static_cast<double>(sum);
}

namespace detail {

/// Derivative of g(x) = sqrt(x) B_a(x), from the term-wise differentiated
/// series: g(x) = sum_m c_m x^{2m+a+1/2} / 2^{2m+a}.
inline double sqrtx_bessel_deriv(double order, double x) {
    const long double lx = static_cast<long double>(x);
    const long double a = static_cast<long double>(order);
    // m = 0 term of the series for g, then recur.
    long double term = std::exp((a + 0.5L) * std::log(lx) - a * std::log(2.0L) -
                                std::lgamma(a + 1.0L));
    long double sum = term * (a + 0.5L) / lx;
    for (int m = 1; m <= 400; ++m) {
        term *= -lx * lx / (4.0L * static_cast<long double>(m) * (m + a));
        const long double deriv_term = term * (2.0L * m + a + 0.5L) / lx;
        sum += deriv_term;
        if (std::fabs(deriv_term) < 1e-22L * (std::fabs(sum) + 1e-300L) &&
            m > static_cast<int>(x))
            break;
    }
    return static_cast<double>(sum);
}

}  // namespace detail

/// First positive stationary point of sqrt(x) B_a(x) with
/// a = sqrt(2d - 1)/2; for d = 1 this is pi/2.
inline double c_d(int d) {
    if (d < 1 || d > 50)
        throw std::invalid_argument("c_d: d must lie in [1, 50]");
    const double order = std::sqrt(2.0 * d - 1.0) / 2.0;
    double lo = 1e-4;
    double flo = detail::sqrtx_bessel_deriv(order, lo);
    double hi = lo;
    bool bracketed = false;
    for (double x = 0.05; x <= 60.0; x += 0.05) {
        const double fx = detail::sqrtx_bessel_deriv(order, x);
        if (flo > 0.0 && fx <= 0.0) {
            hi = x;
            bracketed = true;
            break;
        }
        lo = x;
        flo = fx;
    }
    if (!bracketed) throw std::runtime_error("c_d: bracketing failure");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::sqrtx_bessel_deriv(order, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

/// Hodges-Lehmann lower bound for the Spearman test's ARE,
/// Omega = 9 (2 c_{d1}^2 + d1 - 1)^2 (2 c_{d2}^2 + d2 - 1)^2
///         / (1024 d1 d2 c_{d1}^2 c_{d2}^2).
inline double omega(int d1, int d2) {
    const double c1 = c_d(d1);
    const double c2 = c_d(d2);
    const double f1 = 2.0 * c1 * c1 + d1 - 1.0;
    const double f2 = 2.0 * c2 * c2 + d2 - 1.0;
    return 9.0 * f1 * f1 * f2 * f2 / (1024.0 * d1 * d2 * c1 * c1 * c2 * c2);
}

/// Poisson mixture of central chi-square CDFs, truncated at 1e-14
/// residual weight.
inline double noncentral_chi2_cdf(double x, int df, double ncp) {
    if (x < 0.0 || ncp < 0.0)
        throw std::invalid_argument("noncentral_chi2_cdf: negative argument");
    if (x == 0.0) return 0.0;
    if (ncp == 0.0) return chi2_cdf(x, df);

    const double half = 0.5 * ncp;
    const int center = static_cast<int>(half);
    auto log_weight = [half](int k) {
        return -half + k * std::log(half) - std::lgamma(k + 1.0);
    };
    double total = std::exp(log_weight(center)) * chi2_cdf(x, df + 2 * center);
    double weight_up = std::exp(log_weight(center));
    double weight_down = weight_up;
    double mass = weight_up;
    for (int step = 1; step < 20000; ++step) {
        bool moved = false;
        const int up = center + step;
        weight_up *= half / up;
        if (weight_up > 1e-18) {
            total += weight_up * chi2_cdf(x, df + 2 * up);
            mass += weight_up;
            moved = true;
        }
        const int down = center - step;
        if (down >= 0) {
            weight_down *= (down + 1) / half;
            if (weight_down > 1e-18) {
                total += weight_down * chi2_cdf(x, df + 2 * down);
                mass += weight_down;
                moved = true;
            }
        }
        if ((!moved || 1.0 - mass < 1e-14) && down < 0) break;
        if (!moved) break;
    }
    return std::min(total, 1.0);
}

/// Power of a chi-square(df) level-alpha test under a noncentral
/// chi-square(df, ncp) alternative.
inline double local_power(int df, double ncp, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("local_power: alpha must lie in (0, 1)");
    const double critical = chi2_quantile(1.0 - alpha, df);
    return 1.0 - noncentral_chi2_cdf(critical, df, ncp);
}

enum class RadialFamily { gaussian, student_t };

struct RadialSpec {
    RadialFamily family = RadialFamily::gaussian;
    int nu = 3;  // student_t only
};

namespace detail {

/// Quantile of ||X|| for the named standard radial law in dimension d.
inline double radial_quantile(const RadialSpec& radial, int d, double u) {
    if (radial.family == RadialFamily::gaussian)
        return std::sqrt(chi2_quantile(u, d));
    return std::sqrt(d * f_quantile(u, d, radial.nu));
}

/// rho = -phi'/phi for the radial density.
inline double radial_rho(const RadialSpec& radial, int d, double r) {
    if (radial.family == RadialFamily::gaussian) return r;
    const double nu = radial.nu;
    return (nu + d) * r / (nu + r * r);
}

/// tanh-sinh (double exponential) quadrature on (0, 1); robust to the
/// integrable endpoint singularities of the score integrands. Halves the
/// step until two refinement levels agree within tol.
inline double integrate01(const std::function<double(double)>& f, double tol) {
    constexpr double half_pi = 1.5707963267948966;
    constexpr double eps = 1e-10;  // endpoint clamp
    constexpr double t_max = 3.8;  // abscissae beyond this are below eps

    auto level_sum = [&](double h, bool odd_only) {
        double sum = 0.0;
        const int step = odd_only ? 2 : 1;
        const int start = odd_only ? 1 : 0;
        const auto count = static_cast<int>(t_max / h);
        for (int k = start; k <= count; k += step) {
            const double t = k * h;
            const double s = half_pi * std::sinh(t);
            const double w = half_pi * std::cosh(t) / std::pow(std::cosh(s), 2);
            const double x = 0.5 * std::tanh(s);  // in (-1/2, 1/2)
            double u_hi = 0.5 + x, u_lo = 0.5 - x;
            if (u_hi > 1.0 - eps) u_hi = 1.0 - eps;
            if (u_lo < eps) u_lo = eps;
            sum += w * (k == 0 ? f(0.5) : f(u_lo) + f(u_hi));
        }
        return sum;
    };

    double h = 0.5;
    double estimate = 0.5 * h * level_sum(h, false);
    for (int level = 0; level < 12; ++level) {
        h *= 0.5;
        const double refined = 0.5 * estimate + 0.5 * h * level_sum(h, true);
        if (level > 2 &&
            std::fabs(refined - estimate) < tol * (1.0 + std::fabs(refined)))
            return refined;
        estimate = refined;
    }
    throw std::runtime_error("integrate01: quadrature did not converge");
}

// ---- small dense symmetric matrix helpers (row-major) ----

inline std::vector<double> matmul(const std::vector<double>& a, int ra, int ca,
                                  const std::vector<double>& b, int cb) {
    std::vector<double> out(static_cast<std::size_t>(ra) * cb, 0.0);
    for (int i = 0; i < ra; ++i)
        for (int k = 0; k < ca; ++k) {
            const double aik = a[static_cast<std::size_t>(i) * ca + k];
            for (int j = 0; j < cb; ++j)
                out[static_cast<std::size_t>(i) * cb + j] +=
                    aik * b[static_cast<std::size_t>(k) * cb + j];
        }
    return out;
}

inline std::vector<double> transpose(const std::vector<double>& a, int r, int c) {
    std::vector<double> out(a.size());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            out[static_cast<std::size_t>(j) * r + i] =
                a[static_cast<std::size_t>(i) * c + j];
    return out;
}

/// Jacobi eigendecomposition of a symmetric matrix; returns eigenvalues,
/// fills eigenvectors as columns of v.
inline std::vector<double> jacobi_eigen(std::vector<double> m, int n,
                                        std::vector<double>& v) {
    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += m[static_cast<std::size_t>(p) * n + q] *
                       m[static_cast<std::size_t>(p) * n + q];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[static_cast<std::size_t>(p) * n + q];
                if (std::fabs(apq) < 1e-300) continue;
                const double app = m[static_cast<std::size_t>(p) * n + p];
                const double aqq = m[static_cast<std::size_t>(q) * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = std::copysign(1.0, theta) /
                                 (std::fabs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double cos_r = 1.0 / std::sqrt(t * t + 1.0);
                const double sin_r = t * cos_r;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m[static_cast<std::size_t>(k) * n + p];
                    const double mkq = m[static_cast<std::size_t>(k) * n + q];
                    m[static_cast<std::size_t>(k) * n + p] =
                        cos_r * mkp - sin_r * mkq;
                    m[static_cast<std::size_t>(k) * n + q] =
                        sin_r * mkp + cos_r * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m[static_cast<std::size_t>(p) * n + k];
                    const double mqk = m[static_cast<std::size_t>(q) * n + k];
                    m[static_cast<std::size_t>(p) * n + k] =
                        cos_r * mpk - sin_r * mqk;
                    m[static_cast<std::size_t>(q) * n + k] =
                        sin_r * mpk + cos_r * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[static_cast<std::size_t>(k) * n + p];
                    const double vkq = v[static_cast<std::size_t>(k) * n + q];
                    v[static_cast<std::size_t>(k) * n + p] =
                        cos_r * vkp - sin_r * vkq;
                    v[static_cast<std::size_t>(k) * n + q] =
                        sin_r * vkp + cos_r * vkq;
                }
            }
    }
    std::vector<double> eigenvalues(n);
    for (int i = 0; i < n; ++i)
        eigenvalues[i] = m[static_cast<std::size_t>(i) * n + i];
    return eigenvalues;
}

/// Symmetric matrix power (1/2 or -1/2) via eigendecomposition.
inline std::vector<double> sym_power(const std::vector<double>& m, int n,
                                     double exponent) {
    std::vector<double> v;
    std::vector<double> lambda = jacobi_eigen(m, n, v);
    for (double& l : lambda) {
        if (l <= 0.0)
            throw std::invalid_argument("sym_power: matrix not positive definite");
        l = std::pow(l, exponent);
    }
    std::vector<double> scaled(v);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            scaled[static_cast<std::size_t>(i) * n + j] *= lambda[j];
    return matmul(scaled, n, n, transpose(v, n, n), n);
}

inline double frobenius_sq(const std::vector<double>& m) {
    double sum = 0.0;
    for (double x : m) sum += x * x;
    return sum;
}

}  // namespace detail

struct EfficiencyReport {
    ScoreKind score1 = ScoreKind::vdw;
    ScoreKind score2 = ScoreKind::vdw;
    RadialSpec radial1, radial2;
    int d1 = 0, d2 = 0;
    double c1 = 0.0, c2 = 0.0;  // score-density cross moments E[J rho(q)]
    double d_moment1 = 0.0, d_moment2 = 0.0;  // E[J q]
    double are = 0.0;
};

/// ARE of the score test against Wilks under elliptical alternatives:
///   || D1 C2 A + D2 C1 B ||^2 / (d1 d2 s1 s2 || A + B ||^2)
/// with A = Sigma1^{1/2} M2' Sigma2^{-1/2}, B = Sigma1^{-1/2} M1 Sigma2^{1/2},
/// C_k = E[J_k(U) rho_k(q_k(U))], D_k = E[J_k(U) q_k(U)].
inline EfficiencyReport are_elliptical(
    const ScoreFunction& score1, const ScoreFunction& score2,
    const RadialSpec& radial1, const RadialSpec& radial2, int d1, int d2,
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<double>& m1, const std::vector<double>& m2) {
    if (sigma1.size() != static_cast<std::size_t>(d1) * d1 ||
        sigma2.size() != static_cast<std::size_t>(d2) * d2 ||
        m1.size() != static_cast<std::size_t>(d1) * d2 ||
        m2.size() != static_cast<std::size_t>(d2) * d1)
        throw std::invalid_argument("are_elliptical: dimension mismatch");

    auto cross_moments = [](const ScoreFunction& score, const RadialSpec& radial,
                            int d) {
        const double c = detail::integrate01(
            [&](double u) {
                return score(u) *
                       detail::radial_rho(radial, d,
                                          detail::radial_quantile(radial, d, u));
            },
            1e-10);
        const double dm = detail::integrate01(
            [&](double u) {
                return score(u) * detail::radial_quantile(radial, d, u);
            },
            1e-10);
        return std::pair<double, double>(c, dm);
    };
    const auto [c1, dm1] = cross_moments(score1, radial1, d1);
    const auto [c2, dm2] = cross_moments(score2, radial2, d2);

    const auto sigma1_half = detail::sym_power(sigma1, d1, 0.5);
    const auto sigma1_invhalf = detail::sym_power(sigma1, d1, -0.5);
    const auto sigma2_half = detail::sym_power(sigma2, d2, 0.5);
    const auto sigma2_invhalf = detail::sym_power(sigma2, d2, -0.5);

    const auto a_mat = detail::matmul(
        detail::matmul(sigma1_half, d1, d1, detail::transpose(m2, d2, d1), d2),
        d1, d2, sigma2_invhalf, d2);
    const auto b_mat = detail::matmul(
        detail::matmul(sigma1_invhalf, d1, d1, m1, d2), d1, d2, sigma2_half, d2);

    std::vector<double> numerator(a_mat.size()), denominator(a_mat.size());
    for (std::size_t k = 0; k < a_mat.size(); ++k) {
        numerator[k] = dm1 * c2 * a_mat[k] + dm2 * c1 * b_mat[k];
        denominator[k] = a_mat[k] + b_mat[k];
    }
    const double denom_fro = detail::frobenius_sq(denominator);
    if (denom_fro == 0.0)
        throw std::invalid_argument("are_elliptical: M1, M2 cancel identically");

    EfficiencyReport report;
    report.score1 = score1.kind;
    report.score2 = score2.kind;
    report.radial1 = radial1;
    report.radial2 = radial2;
    report.d1 = d1;
    report.d2 = d2;
    report.c1 = c1;
    report.c2 = c2;
    report.d_moment1 = dm1;
    report.d_moment2 = dm2;
    report.are = detail::frobenius_sq(numerator) /
                 (d1 * d2 * score1.sigma2 * score2.sigma2 * denom_fro);
    return report;
}

}  // namespace corank
