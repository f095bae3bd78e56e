// Sampling from generalized Konijn families: two independent marginal
// blocks mixed linearly through M_delta.
#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/grid.hpp"  // Vec
#include "corank/rng.hpp"

namespace corank {

enum class MarginalKind {
    gaussian,          // standard normal N(0, I_d)
    elliptical_t,      // multivariate t_nu with identity scatter
    independent_t,     // i.i.d. univariate t_nu components
    chi2_1_components  // i.i.d. chi-square(1) components
};

inline std::string marginal_kind_name(MarginalKind kind) {
    switch (kind) {
        case MarginalKind::gaussian: return "gaussian";
        case MarginalKind::elliptical_t: return "elliptical_t";
        case MarginalKind::independent_t: return "independent_t";
        case MarginalKind::chi2_1_components: return "chi2_1";
    }
    return "?";
}

struct KonijnConfig {
    int d1 = 0, d2 = 0;
    MarginalKind marginal1 = MarginalKind::gaussian;
    MarginalKind marginal2 = MarginalKind::gaussian;
    int nu = 3;  // degrees of freedom for the t kinds
    std::vector<double> m1;  // d1 x d2 row-major
    std::vector<double> m2;  // d2 x d1 row-major
    double delta = 0.0;

    static KonijnConfig identity_case(int d1, int d2, MarginalKind kind,
                                      double delta) {
        // Standard simulation design: M1 = M2' = I.
        KonijnConfig config;
        config.d1 = d1;
        config.d2 = d2;
        config.marginal1 = config.marginal2 = kind;
        config.delta = delta;
        config.m1.assign(static_cast<std::size_t>(d1) * d2, 0.0);
        config.m2.assign(static_cast<std::size_t>(d2) * d1, 0.0);
        for (int i = 0; i < std::min(d1, d2); ++i) {
            config.m1[static_cast<std::size_t>(i) * d2 + i] = 1.0;
            config.m2[static_cast<std::size_t>(i) * d1 + i] = 1.0;
        }
        return config;
    }
};

namespace detail {

inline double chi2_draw(NormalSampler& normal, int df) {
    double sum = 0.0;
    for (int k = 0; k < df; ++k) {
        const double z = normal();
        sum += z * z;
    }
    return sum;
}

inline Vec marginal_row(MarginalKind kind, int d, int nu,
                        NormalSampler& normal) {
    Vec row(d);
    switch (kind) {
        case MarginalKind::gaussian:
            for (double& x : row) x = normal();
            break;
        case MarginalKind::elliptical_t: {
            // Gaussian vector over a shared chi scaling gives the
            // multivariate t.
            const double scale = std::sqrt(chi2_draw(normal, nu) / nu);
            for (double& x : row) x = normal() / scale;
            break;
        }
        case MarginalKind::independent_t:
            for (double& x : row)
                x = normal() / std::sqrt(chi2_draw(normal, nu) / nu);
            break;
        case MarginalKind::chi2_1_components:
            for (double& x : row) {
                const double z = normal();
                x = z * z;
            }
            break;
    }
    return row;
}

}  // namespace detail

/// n i.i.d. rows from the named marginal law.
inline std::vector<Vec> sample_marginal(MarginalKind kind, int d, int n,
                                        PhiloxEngine& rng, int nu = 3) {
    if (n < 1 || d < 1)
        throw std::invalid_argument("sample_marginal: n, d must be positive");
    NormalSampler normal(rng);
    std::vector<Vec> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = detail::marginal_row(kind, d, nu, normal);
    return rows;
}

/// Row-wise mixing: X1 = (1-delta) X1* + delta M1 X2*,
///                  X2 = delta M2 X1* + (1-delta) X2*.
inline void mix(const KonijnConfig& config, const Vec& x1_star,
                const Vec& x2_star, Vec& x1, Vec& x2) {
    const int d1 = config.d1, d2 = config.d2;
    if (static_cast<int>(x1_star.size()) != d1 ||
        static_cast<int>(x2_star.size()) != d2 ||
        config.m1.size() != static_cast<std::size_t>(d1) * d2 ||
        config.m2.size() != static_cast<std::size_t>(d2) * d1)
        throw std::invalid_argument("mix: dimension mismatch");
    const double keep = 1.0 - config.delta;
    x1.assign(d1, 0.0);
    x2.assign(d2, 0.0);
    for (int j = 0; j < d1; ++j) {
        double cross = 0.0;
        for (int l = 0; l < d2; ++l)
            cross += config.m1[static_cast<std::size_t>(j) * d2 + l] * x2_star[l];
        x1[j] = keep * x1_star[j] + config.delta * cross;
    }
    for (int l = 0; l < d2; ++l) {
        double cross = 0.0;
        for (int j = 0; j < d1; ++j)
            cross += config.m2[static_cast<std::size_t>(l) * d1 + j] * x1_star[j];
        x2[l] = config.delta * cross + keep * x2_star[l];
    }
}

struct PairedSample {
    std::vector<Vec> block1;
    std::vector<Vec> block2;
};

/// n independent copies of the mixed vector; deterministic given
/// (seed, stream). Distinct streams give independent replicates.
inline PairedSample generate(const KonijnConfig& config, int n,
                             std::uint64_t seed, std::uint64_t stream = 0) {
    PhiloxEngine rng(seed, stream);
    const auto stars1 = sample_marginal(config.marginal1, config.d1, n, rng,
                                        config.nu);
    const auto stars2 = sample_marginal(config.marginal2, config.d2, n, rng,
                                        config.nu);
    PairedSample sample;
    sample.block1.resize(n);
    sample.block2.resize(n);
    for (int i = 0; i < n; ++i)
        mix(config, stars1[i], stars2[i], sample.block1[i], sample.block2[i]);
    return sample;
}

}  // namespace corank
