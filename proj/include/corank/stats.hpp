// Cross-covariance matrices of center-outward ranks and signs, the
// associated test statistics, asymptotic p-values, and the Wilks benchmark.
#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/scores.hpp"
#include "corank/special_functions.hpp"
#include "corank/transport.hpp"

namespace corank {

namespace detail {

/// Kahan-compensated accumulator; keeps Frobenius norms reproducible
/// across summation orders at the 1e-12 level.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

enum class CrossCovKind { sign, spearman, kendall, score };

struct CrossCovMatrix {
    CrossCovKind kind = CrossCovKind::sign;
    int d1 = 0, d2 = 0;
    std::vector<double> w;  // row-major d1 x d2
    double sigma2_1 = 1.0, sigma2_2 = 1.0;  // score variances behind this W

    double operator()(int j, int l) const {
        return w[static_cast<std::size_t>(j) * d2 + l];
    }
    double frobenius_sq() const {
        detail::KahanSum acc;
        for (double x : w) acc.add(x * x);
        return acc.value();
    }
};

/// W_J = (1/n) sum_i J1(R1_i) J2(R2_i) S1_i S2_i'. With J = 1 this is the
/// sign matrix; with J(u) = u the Spearman matrix (products of images).
inline CrossCovMatrix w_score(const RanksSigns& rs1, const RanksSigns& rs2,
                              const ScoreFunction& score1,
                              const ScoreFunction& score2) {
    const std::size_t n = rs1.signs.size();
    if (n != rs2.signs.size() || n == 0)
        throw std::invalid_argument("w_score: length mismatch");
    const int d1 = static_cast<int>(rs1.signs.front().size());
    const int d2 = static_cast<int>(rs2.signs.front().size());

    CrossCovMatrix result;
    result.kind = score1.kind == ScoreKind::sign && score2.kind == ScoreKind::sign
                      ? CrossCovKind::sign
                  : score1.kind == ScoreKind::wilcoxon &&
                          score2.kind == ScoreKind::wilcoxon
                      ? CrossCovKind::spearman
                      : CrossCovKind::score;
    result.d1 = d1;
    result.d2 = d2;
    result.sigma2_1 = score1.sigma2;
    result.sigma2_2 = score2.sigma2;

    std::vector<detail::KahanSum> acc(static_cast<std::size_t>(d1) * d2);
    for (std::size_t i = 0; i < n; ++i) {
        const double weight =
            score1(rs1.rescaled_ranks[i]) * score2(rs2.rescaled_ranks[i]);
        for (int j = 0; j < d1; ++j)
            for (int l = 0; l < d2; ++l)
                acc[static_cast<std::size_t>(j) * d2 + l].add(
                    weight * rs1.signs[i][j] * rs2.signs[i][l]);
    }
    result.w.resize(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k)
        result.w[k] = acc[k].value() / static_cast<double>(n);
    return result;
}

inline CrossCovMatrix w_sign(const RanksSigns& rs1, const RanksSigns& rs2) {
    return w_score(rs1, rs2, make_score(ScoreKind::sign),
                   make_score(ScoreKind::sign));
}

inline CrossCovMatrix w_spearman(const RanksSigns& rs1, const RanksSigns& rs2) {
    return w_score(rs1, rs2, make_score(ScoreKind::wilcoxon),
                   make_score(ScoreKind::wilcoxon));
}

/// Entrywise Kendall matrix: average over pairs i < i' of the signs of the
/// outer product of image differences. O(n^2 d1 d2) direct double loop.
inline CrossCovMatrix w_kendall(const RanksSigns& rs1, const RanksSigns& rs2) {
    const std::size_t n = rs1.images.size();
    if (n != rs2.images.size())
        throw std::invalid_argument("w_kendall: length mismatch");
    if (n < 2) throw std::invalid_argument("w_kendall: need n >= 2");
    const int d1 = static_cast<int>(rs1.images.front().size());
    const int d2 = static_cast<int>(rs2.images.front().size());

    CrossCovMatrix result;
    result.kind = CrossCovKind::kendall;
    result.d1 = d1;
    result.d2 = d2;
    // Entry signs are integers, so a plain accumulator is exact here.
    std::vector<std::int64_t> acc(static_cast<std::size_t>(d1) * d2, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ip = i + 1; ip < n; ++ip) {
            for (int j = 0; j < d1; ++j) {
                const double a = rs1.images[i][j] - rs1.images[ip][j];
                if (a == 0.0) continue;
                for (int l = 0; l < d2; ++l) {
                    const double b = rs2.images[i][l] - rs2.images[ip][l];
                    const double prod = a * b;
                    if (prod > 0.0)
                        ++acc[static_cast<std::size_t>(j) * d2 + l];
                    else if (prod < 0.0)
                        --acc[static_cast<std::size_t>(j) * d2 + l];
                }
            }
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * (n - 1);
    result.w.resize(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k)
        result.w[k] = static_cast<double>(acc[k]) / pairs;
    return result;
}

struct TestResult {
    std::string name;
    double statistic = 0.0;
    int df = 0;
    double pvalue = 1.0;
    std::string method = "asymptotic";
};

inline double p_value_asymptotic(double statistic, int df) {
    if (statistic < 0.0)
        throw std::invalid_argument("p_value_asymptotic: negative statistic");
    return 1.0 - chi2_cdf(statistic, df);
}

/// Scaled squared Frobenius norm of W:
///   sign:     n d1 d2 ||W||^2
///   spearman: 9 n d1 d2 ||W||^2
///   kendall:  (9n/4) ||W||^2
///   score J:  n d1 d2 / (sigma2_1 sigma2_2) ||W||^2
inline double t_statistic_value(const CrossCovMatrix& w, int n) {
    const double fro2 = w.frobenius_sq();
    const double dd = static_cast<double>(w.d1) * w.d2;
    switch (w.kind) {
        case CrossCovKind::sign:
            return n * dd * fro2;
        case CrossCovKind::spearman:
            return 9.0 * n * dd * fro2;
        case CrossCovKind::kendall:
            return 2.25 * n * fro2;
        case CrossCovKind::score:
            return n * dd / (w.sigma2_1 * w.sigma2_2) * fro2;
    }
    return 0.0;
}

inline TestResult t_statistic(const CrossCovMatrix& w, int n,
                              const std::string& name) {
    TestResult result;
    result.name = name;
    result.statistic = t_statistic_value(w, n);
    result.df = w.d1 * w.d2;
    result.pvalue = p_value_asymptotic(result.statistic, result.df);
    return result;
}

namespace detail {

/// Determinant by LU with partial pivoting; m is n x n row-major,
/// destroyed in place.
inline double lu_determinant(std::vector<double>& m, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::fabs(m[row * n + col]) > std::fabs(m[pivot * n + col]))
                pivot = row;
        if (m[pivot * n + col] == 0.0) return 0.0;
        if (pivot != col) {
            for (int k = 0; k < n; ++k)
                std::swap(m[pivot * n + k], m[col * n + k]);
            det = -det;
        }
        det *= m[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double factor = m[row * n + col] / m[col * n + col];
            for (int k = col; k < n; ++k)
                m[row * n + k] -= factor * m[col * n + k];
        }
    }
    return det;
}

}  // namespace detail

/// Wilks' pseudo-Gaussian statistic n log[det(S1) det(S2) / det(S)] with
/// 1/(n-1)-normalized sample covariances and a chi-square(d1 d2) p-value.
inline TestResult wilks(const std::vector<Vec>& sample1,
                        const std::vector<Vec>& sample2) {
    const int n = static_cast<int>(sample1.size());
    if (n != static_cast<int>(sample2.size()) || n == 0)
        throw std::invalid_argument("wilks: length mismatch");
    const int d1 = static_cast<int>(sample1.front().size());
    const int d2 = static_cast<int>(sample2.front().size());
    const int d = d1 + d2;
    if (n <= d)
        throw std::invalid_argument("wilks: need n > d1 + d2");

    std::vector<double> mean(d, 0.0);
    auto joint = [&](int i, int k) {
        return k < d1 ? sample1[i][k] : sample2[i][k - d1];
    };
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) mean[k] += joint(i, k);
    for (double& m : mean) m /= n;

    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b)
                cov[a * d + b] += (joint(i, a) - mean[a]) * (joint(i, b) - mean[b]);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            cov[a * d + b] /= (n - 1);
            cov[b * d + a] = cov[a * d + b];
        }

    std::vector<double> block1(static_cast<std::size_t>(d1) * d1);
    std::vector<double> block2(static_cast<std::size_t>(d2) * d2);
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d1; ++b) block1[a * d1 + b] = cov[a * d + b];
    for (int a = 0; a < d2; ++a)
        for (int b = 0; b < d2; ++b)
            block2[a * d2 + b] = cov[(d1 + a) * d + (d1 + b)];

    const double det1 = detail::lu_determinant(block1, d1);
    const double det2 = detail::lu_determinant(block2, d2);
    const double det_joint = detail::lu_determinant(cov, d);
    if (det_joint <= 0.0 || det1 <= 0.0 || det2 <= 0.0)
        throw std::runtime_error("wilks: degenerate (singular) covariance");

    TestResult result;
    result.name = "wilks";
    result.statistic = n * (std::log(det1) + std::log(det2) - std::log(det_joint));
    if (result.statistic < 0.0 && result.statistic > -1e-9)
        result.statistic = 0.0;  // V >= 1 analytically; clamp roundoff
    result.df = d1 * d2;
    result.pvalue = p_value_asymptotic(result.statistic, result.df);
    return result;
}

enum class RankTest { sign, spearman, kendall, vdw };

inline std::string rank_test_name(RankTest test) {
    switch (test) {
        case RankTest::sign: return "sign";
        case RankTest::spearman: return "spearman";
        case RankTest::kendall: return "kendall";
        case RankTest::vdw: return "vdw";
    }
    return "?";
}

inline CrossCovMatrix rank_test_w(RankTest test, const RanksSigns& rs1,
                                  const RanksSigns& rs2) {
    switch (test) {
        case RankTest::sign:
            return w_sign(rs1, rs2);
        case RankTest::spearman:
            return w_spearman(rs1, rs2);
        case RankTest::kendall:
            return w_kendall(rs1, rs2);
        case RankTest::vdw: {
            const int d1 = static_cast<int>(rs1.signs.front().size());
            const int d2 = static_cast<int>(rs2.signs.front().size());
            return w_score(rs1, rs2, make_score(ScoreKind::vdw, d1),
                           make_score(ScoreKind::vdw, d2));
        }
    }
    throw std::logic_error("rank_test_w: bad kind");
}

inline TestResult rank_test(RankTest test, const RanksSigns& rs1,
                            const RanksSigns& rs2) {
    const int n = static_cast<int>(rs1.signs.size());
    return t_statistic(rank_test_w(test, rs1, rs2), n, rank_test_name(test));
}

/// {"name", "statistic", "df", "pvalue", "method"} with 15-significant-digit
/// numbers.
inline std::string to_json(const TestResult& result) {
    std::ostringstream out;
    out << std::setprecision(15);
    out << "{\"name\":\"" << result.name << "\",\"statistic\":" << result.statistic
        << ",\"df\":" << result.df << ",\"pvalue\":" << result.pvalue
        << ",\"method\":\"" << result.method << "\"}";
    return out.str();
}

}  // namespace corank
