// Score functions for the rank statistics: sign (constant), Wilcoxon, and
// van der Waerden (square root of the chi-square quantile).
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "corank/special_functions.hpp"

namespace corank {

enum class ScoreKind { sign, wilcoxon, vdw };

struct ScoreFunction {
    ScoreKind kind = ScoreKind::sign;
    int d = 0;  // dimension, used by vdw only
    double sigma2 = 1.0;  // integral of J^2 over (0, 1)

    double operator()(double u) const {
        switch (kind) {
            case ScoreKind::sign:
                return 1.0;
            case ScoreKind::wilcoxon:
                return u;
            case ScoreKind::vdw:
                return std::sqrt(chi2_quantile(u, d));
        }
        return 0.0;
    }
};

/// sign: J = 1, sigma2 = 1. wilcoxon: J(u) = u, sigma2 = 1/3.
/// vdw(d): J(u) = sqrt of the chi2_d quantile, sigma2 = d (the chi2 mean).
inline ScoreFunction make_score(ScoreKind kind, int d = 0) {
    ScoreFunction score;
    score.kind = kind;
    switch (kind) {
        case ScoreKind::sign:
            score.sigma2 = 1.0;
            break;
        case ScoreKind::wilcoxon:
            score.sigma2 = 1.0 / 3.0;
            break;
        case ScoreKind::vdw:
            if (d < 1)
                throw std::invalid_argument("make_score: vdw needs d >= 1");
            score.d = d;
            score.sigma2 = static_cast<double>(d);
            break;
    }
    return score;
}

inline std::string score_kind_name(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::sign: return "sign";
        case ScoreKind::wilcoxon: return "wilcoxon";
        case ScoreKind::vdw: return "vdw";
    }
    return "?";
}

}  // namespace corank
