// Cross-covariance matrices, T statistics, p-values, Wilks benchmark, and
// the univariate reduction to classical rank statistics.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "corank/rng.hpp"
#include "corank/stats.hpp"

using namespace corank;

namespace {

RanksSigns univariate_ranks(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    const Grid grid = build_grid(n, 1, 0);
    std::vector<Vec> sample;
    sample.reserve(n);
    for (double v : values) sample.push_back({v});
    return center_outward(sample, grid);
}

// Classical Kendall tau on raw univariate data: (concordant - discordant)
// over the number of pairs.
double kendall_tau_oracle(const std::vector<double>& x,
                          const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    std::int64_t net = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double prod = (x[i] - x[j]) * (y[i] - y[j]);
            if (prod > 0.0) ++net;
            else if (prod < 0.0) --net;
        }
    return static_cast<double>(net) / (0.5 * static_cast<double>(n) * (n - 1));
}

// Classical quadrant statistic from univariate ranks.
double quadrant_oracle(const std::vector<double>& x,
                       const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    auto rank_of = [n](const std::vector<double>& v, int i) {
        int r = 1;
        for (int j = 0; j < n; ++j)
            if (v[j] < v[i]) ++r;
        return r;
    };
    const double center = 0.5 * (n + 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += ((rank_of(x, i) > center) ? 1.0 : -1.0) *
               ((rank_of(y, i) > center) ? 1.0 : -1.0);
    return sum / n;
}

}  // namespace

TEST_CASE("sign cross-covariance of identical monotone data is one") {
    const RanksSigns rs = univariate_ranks({1, 2, 3, 4});
    const CrossCovMatrix w = w_sign(rs, rs);
    CHECK(w.d1 == 1);
    CHECK(w.d2 == 1);
    CHECK(w(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spearman cross-covariance hand values") {
    const RanksSigns rs1 = univariate_ranks({1, 2, 3, 4});
    CHECK(w_spearman(rs1, rs1)(0, 0) ==
          doctest::Approx(5.0 / 18.0).epsilon(1e-14));
    const RanksSigns rs2 = univariate_ranks({2, 1, 4, 3});
    CHECK(w_spearman(rs1, rs2)(0, 0) ==
          doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("kendall cross-covariance hand values") {
    const RanksSigns rs1 = univariate_ranks({1, 2, 3, 4});
    CHECK(w_kendall(rs1, rs1)(0, 0) == doctest::Approx(1.0));
    const RanksSigns reversed = univariate_ranks({4, 3, 2, 1});
    CHECK(w_kendall(rs1, reversed)(0, 0) == doctest::Approx(-1.0));
    const RanksSigns rs2 = univariate_ranks({2, 1, 4, 3});
    CHECK(w_kendall(rs1, rs2)(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("univariate kendall W equals classical tau exactly") {
    PhiloxEngine rng(31, 0);
    NormalSampler normal(rng);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 8 + 2 * static_cast<int>(uniform_below(rng, 17));  // even, 8..40
        std::vector<double> x(n), y(n);
        for (double& v : x) v = normal();
        for (double& v : y) v = normal();
        const RanksSigns rs1 = univariate_ranks(x);
        const RanksSigns rs2 = univariate_ranks(y);
        CAPTURE(trial);
        CAPTURE(n);
        CHECK(w_kendall(rs1, rs2)(0, 0) == kendall_tau_oracle(x, y));
    }
}

TEST_CASE("univariate sign W equals the classical quadrant statistic") {
    PhiloxEngine rng(32, 0);
    NormalSampler normal(rng);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 8 + 2 * static_cast<int>(uniform_below(rng, 17));
        std::vector<double> x(n), y(n);
        for (double& v : x) v = normal();
        for (double& v : y) v = normal();
        const RanksSigns rs1 = univariate_ranks(x);
        const RanksSigns rs2 = univariate_ranks(y);
        CHECK(w_sign(rs1, rs2)(0, 0) ==
              doctest::Approx(quadrant_oracle(x, y)).epsilon(1e-13));
    }
}

TEST_CASE("T statistic scalings") {
    CrossCovMatrix w;
    w.kind = CrossCovKind::sign;
    w.d1 = w.d2 = 1;
    w.w = {1.0};
    CHECK(t_statistic_value(w, 4) == 4.0);  // n d1 d2 ||W||^2

    w.w = {0.0};
    for (CrossCovKind kind : {CrossCovKind::sign, CrossCovKind::spearman,
                              CrossCovKind::kendall, CrossCovKind::score}) {
        w.kind = kind;
        CHECK(t_statistic_value(w, 10) == 0.0);
    }

    // generic score formula reproduces the dedicated vdW scaling
    const RanksSigns rs1 = univariate_ranks({1.5, -2.0, 0.3, 4.0, -1.1, 2.2});
    const RanksSigns rs2 = univariate_ranks({0.4, 1.9, -3.0, 0.8, 2.5, -0.6});
    const CrossCovMatrix wv = w_score(rs1, rs2, make_score(ScoreKind::vdw, 1),
                                      make_score(ScoreKind::vdw, 1));
    const double generic = t_statistic_value(wv, 6);
    const double explicit_form =
        6.0 * 1.0 * 1.0 / (1.0 * 1.0) * wv.frobenius_sq();
    CHECK(generic == doctest::Approx(explicit_form).epsilon(1e-12));
}

TEST_CASE("asymptotic p-values") {
    CHECK(p_value_asymptotic(0.0, 4) == 1.0);
    CHECK(p_value_asymptotic(9.4877290368, 4) ==
          doctest::Approx(0.05).epsilon(1e-6));
    // chi-square(1) tail at 4 equals the two-sided normal tail at 2
    CHECK(p_value_asymptotic(4.0, 1) ==
          doctest::Approx(std::erfc(2.0 / std::sqrt(2.0))).epsilon(1e-10));
    CHECK(p_value_asymptotic(4.0, 1) == doctest::Approx(0.0455).epsilon(1e-3));
    CHECK_THROWS_AS(p_value_asymptotic(-1.0, 2), std::invalid_argument);
}

TEST_CASE("wilks with exactly zero cross-covariance gives T = 0") {
    const std::vector<Vec> block1 = {{1.0}, {-1.0}, {2.0}, {-2.0}};
    const std::vector<Vec> block2 = {{1.0}, {1.0}, {-1.0}, {-1.0}};
    const TestResult result = wilks(block1, block2);
    CHECK(result.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(result.pvalue == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("univariate wilks reduces to -n log(1 - r^2)") {
    PhiloxEngine rng(44, 0);
    NormalSampler normal(rng);
    const int n = 30;
    std::vector<Vec> block1(n, Vec(1)), block2(n, Vec(1));
    for (int i = 0; i < n; ++i) {
        block1[i][0] = normal();
        block2[i][0] = 0.5 * block1[i][0] + normal();
    }
    // sample correlation, 1/(n-1) convention cancels in the ratio
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        m1 += block1[i][0];
        m2 += block2[i][0];
    }
    m1 /= n;
    m2 /= n;
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (int i = 0; i < n; ++i) {
        s11 += (block1[i][0] - m1) * (block1[i][0] - m1);
        s22 += (block2[i][0] - m2) * (block2[i][0] - m2);
        s12 += (block1[i][0] - m1) * (block2[i][0] - m2);
    }
    const double r2 = s12 * s12 / (s11 * s22);
    const TestResult result = wilks(block1, block2);
    CHECK(result.statistic ==
          doctest::Approx(-n * std::log(1.0 - r2)).epsilon(1e-10));
    CHECK(result.df == 1);
}

TEST_CASE("wilks input validation") {
    const std::vector<Vec> tiny = {{1.0}, {2.0}};
    CHECK_THROWS_AS(wilks(tiny, tiny), std::invalid_argument);
    const std::vector<Vec> constant = {{1.0}, {1.0}, {1.0}, {1.0}};
    const std::vector<Vec> other = {{1.0}, {2.0}, {3.0}, {4.0}};
    CHECK_THROWS_AS(wilks(constant, other), std::runtime_error);
}

TEST_CASE("test result JSON carries all fields") {
    TestResult result;
    result.name = "vdw";
    result.statistic = 3.25;
    result.df = 4;
    result.pvalue = 0.51;
    const std::string json = to_json(result);
    CHECK(json.find("\"name\":\"vdw\"") != std::string::npos);
    CHECK(json.find("\"statistic\":3.25") != std::string::npos);
    CHECK(json.find("\"df\":4") != std::string::npos);
    CHECK(json.find("\"pvalue\":0.51") != std::string::npos);
    CHECK(json.find("\"method\":\"asymptotic\"") != std::string::npos);
}
