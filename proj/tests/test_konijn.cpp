// Konijn-family sampling: mixing algebra, marginal moments, radial tails,
// and determinism.
#include <doctest.h>

#include <cmath>

#include "corank/konijn.hpp"
#include "corank/special_functions.hpp"

using namespace corank;

TEST_CASE("delta = 0 leaves the blocks untouched") {
    const KonijnConfig config =
        KonijnConfig::identity_case(2, 2, MarginalKind::gaussian, 0.0);
    const Vec x1_star = {1.5, -0.3}, x2_star = {0.7, 2.2};
    Vec x1, x2;
    mix(config, x1_star, x2_star, x1, x2);
    CHECK(x1 == x1_star);
    CHECK(x2 == x2_star);
}

TEST_CASE("delta = 1 with identity mixing swaps the blocks") {
    const KonijnConfig config =
        KonijnConfig::identity_case(2, 2, MarginalKind::gaussian, 1.0);
    const Vec x1_star = {1.5, -0.3}, x2_star = {0.7, 2.2};
    Vec x1, x2;
    mix(config, x1_star, x2_star, x1, x2);
    CHECK(x1 == x2_star);
    CHECK(x2 == x1_star);
}

TEST_CASE("local parameterization delta = tau / sqrt(n)") {
    CHECK(0.8 / std::sqrt(432.0) == doctest::Approx(0.03849).epsilon(1e-3));
}

TEST_CASE("mix validates dimensions") {
    const KonijnConfig config =
        KonijnConfig::identity_case(2, 3, MarginalKind::gaussian, 0.1);
    Vec x1, x2;
    CHECK_THROWS_AS(mix(config, {1.0}, {1.0, 2.0, 3.0}, x1, x2),
                    std::invalid_argument);
}

TEST_CASE("gaussian marginal moments") {
    PhiloxEngine rng(101, 0);
    const auto rows = sample_marginal(MarginalKind::gaussian, 3, 100000, rng);
    double mean[3] = {0, 0, 0};
    for (const Vec& row : rows)
        for (int j = 0; j < 3; ++j) mean[j] += row[j];
    for (double& m : mean) m /= rows.size();
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(mean[j]) < 0.02);

    double cov[3][3] = {};
    for (const Vec& row : rows)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                cov[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            cov[a][b] /= rows.size();
            const double target = a == b ? 1.0 : 0.0;
            CHECK(std::fabs(cov[a][b] - target) < 0.03);
        }
}

TEST_CASE("independent t(3) has variance nu/(nu-2) = 3") {
    PhiloxEngine rng(102, 0);
    const auto rows = sample_marginal(MarginalKind::independent_t, 1, 1000000,
                                      rng, 3);
    double mean = 0.0;
    for (const Vec& row : rows) mean += row[0];
    mean /= rows.size();
    double var = 0.0;
    for (const Vec& row : rows) var += (row[0] - mean) * (row[0] - mean);
    var /= rows.size();
    CHECK(var == doctest::Approx(3.0).epsilon(0.10));
}

TEST_CASE("chi-square(1) components have mean 1 and variance 2") {
    PhiloxEngine rng(103, 0);
    const auto rows =
        sample_marginal(MarginalKind::chi2_1_components, 1, 1000000, rng);
    double mean = 0.0;
    for (const Vec& row : rows) mean += row[0];
    mean /= rows.size();
    double var = 0.0;
    for (const Vec& row : rows) var += (row[0] - mean) * (row[0] - mean);
    var /= rows.size();
    CHECK(std::fabs(mean - 1.0) < 0.005);
    CHECK(std::fabs(var - 2.0) < 0.05);
}

TEST_CASE("elliptical t(3) radial CDF matches the F law") {
    // ||X||^2 / d follows F(d, nu) for the standard multivariate t
    const int d = 2, nu = 3, n = 200000;
    PhiloxEngine rng(104, 0);
    const auto rows = sample_marginal(MarginalKind::elliptical_t, d, n, rng, nu);
    for (double u : {0.5, 0.9, 0.99}) {
        const double threshold = d * f_quantile(u, d, nu);
        int below = 0;
        for (const Vec& row : rows) {
            double norm2 = 0.0;
            for (double x : row) norm2 += x * x;
            if (norm2 <= threshold) ++below;
        }
        CHECK(std::fabs(static_cast<double>(below) / n - u) < 0.01);
    }
}

TEST_CASE("mixed cross-covariance is delta (1 - delta) (M1 + M2')") {
    const double delta = 0.1;
    const int n = 100000;
    const KonijnConfig config =
        KonijnConfig::identity_case(2, 2, MarginalKind::gaussian, delta);
    const PairedSample sample = generate(config, n, 202);
    // target = 2 delta (1 - delta) I for M1 = M2' = I
    const double target = 2.0 * delta * (1.0 - delta);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double cross = 0.0;
            for (int i = 0; i < n; ++i)
                cross += sample.block1[i][a] * sample.block2[i][b];
            cross /= n;
            const double expected = a == b ? target : 0.0;
            CHECK(std::fabs(cross - expected) < 4.0 / std::sqrt(n));
        }
}

TEST_CASE("generation is deterministic in (seed, stream)") {
    const KonijnConfig config =
        KonijnConfig::identity_case(2, 3, MarginalKind::elliptical_t, 0.05);
    const PairedSample a = generate(config, 50, 7, 3);
    const PairedSample b = generate(config, 50, 7, 3);
    CHECK(a.block1 == b.block1);
    CHECK(a.block2 == b.block2);
    const PairedSample c = generate(config, 50, 7, 4);
    CHECK(a.block1 != c.block1);
}
