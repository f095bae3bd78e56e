// Exact distribution-free null distributions. Under independence the
// pairing of the two grids is a uniform random permutation, so the null law
// of each statistic is simulated (or, for tiny n, enumerated) without data
// and without assignment solves.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/grid.hpp"
#include "corank/rng.hpp"
#include "corank/stats.hpp"
#include "corank/transport.hpp"

namespace corank {

struct NullTable {
    RankTest test = RankTest::sign;
    int n = 0, d1 = 0, d2 = 0;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    std::vector<double> values;  // sorted ascending

    int draws() const { return static_cast<int>(values.size()); }
};

namespace detail {

inline double pairing_statistic(RankTest test, const RanksSigns& rs1,
                                const RanksSigns& rs2_base,
                                const std::vector<int>& perm) {
    std::vector<Vec> images(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
        images[i] = rs2_base.images[perm[i]];
    const RanksSigns rs2 =
        ranks_signs_from_images(std::move(images), rs2_base.n_radii);
    return t_statistic_value(rank_test_w(test, rs1, rs2),
                             static_cast<int>(perm.size()));
}

/// For the score-type statistics (everything but Kendall) the statistic of a
/// pairing is a bilinear form in the fixed vectors a_i = J1(R1_i) S1_i and
/// b_j = J2(R2_j) S2_j, so both sides can be precomputed once per table.
struct ScorePairingCache {
    int n = 0, d1 = 0, d2 = 0;
    double scale = 0.0;  // multiplier turning n^2 ||sum a b'||^2 into T
    std::vector<double> a;  // n x d1 row-major
    std::vector<double> b;  // n x d2 row-major

    ScorePairingCache(RankTest test, const RanksSigns& rs1,
                      const RanksSigns& rs2) {
        n = static_cast<int>(rs1.signs.size());
        d1 = static_cast<int>(rs1.signs.front().size());
        d2 = static_cast<int>(rs2.signs.front().size());
        const auto scores = [test](int d) {
            switch (test) {
                case RankTest::sign: return make_score(ScoreKind::sign);
                case RankTest::spearman:
                    return make_score(ScoreKind::wilcoxon);
                case RankTest::vdw: return make_score(ScoreKind::vdw, d);
                default:
                    throw std::logic_error("ScorePairingCache: kendall");
            }
        };
        const ScoreFunction score1 = scores(d1), score2 = scores(d2);
        a.resize(static_cast<std::size_t>(n) * d1);
        b.resize(static_cast<std::size_t>(n) * d2);
        for (int i = 0; i < n; ++i) {
            const double j1 = score1(rs1.rescaled_ranks[i]);
            for (int k = 0; k < d1; ++k)
                a[static_cast<std::size_t>(i) * d1 + k] = j1 * rs1.signs[i][k];
            const double j2 = score2(rs2.rescaled_ranks[i]);
            for (int k = 0; k < d2; ++k)
                b[static_cast<std::size_t>(i) * d2 + k] = j2 * rs2.signs[i][k];
        }
        const double dd = static_cast<double>(d1) * d2;
        switch (test) {
            case RankTest::sign: scale = n * dd; break;
            case RankTest::spearman: scale = 9.0 * n * dd; break;
            case RankTest::vdw:
                scale = n * dd / (score1.sigma2 * score2.sigma2);
                break;
            default: break;
        }
    }

    double statistic(const std::vector<int>& perm) const {
        std::vector<double> w(static_cast<std::size_t>(d1) * d2, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* ai = a.data() + static_cast<std::size_t>(i) * d1;
            const double* bi =
                b.data() + static_cast<std::size_t>(perm[i]) * d2;
            for (int j = 0; j < d1; ++j)
                for (int l = 0; l < d2; ++l) w[j * d2 + l] += ai[j] * bi[l];
        }
        double fro2 = 0.0;
        for (double x : w) fro2 += (x / n) * (x / n);
        return scale * fro2;
    }
};

}  // namespace detail

/// B statistic draws under uniform random pairings of the two grids.
/// Deterministic given the seed: replicate b uses its own Philox stream, so
/// results do not depend on evaluation order.
inline NullTable simulate_null(RankTest test, const Grid& grid1,
                               const Grid& grid2, int draws,
                               std::uint64_t seed) {
    if (grid1.spec.n != grid2.spec.n)
        throw std::invalid_argument("simulate_null: mismatched n");
    if (draws < 100)
        throw std::invalid_argument("simulate_null: need B >= 100");

    const int n = grid1.spec.n;
    const RanksSigns rs1 =
        ranks_signs_from_images(grid1.points, grid1.spec.n_radii);
    const RanksSigns rs2_base =
        ranks_signs_from_images(grid2.points, grid2.spec.n_radii);

    NullTable table;
    table.test = test;
    table.n = n;
    table.d1 = grid1.spec.d;
    table.d2 = grid2.spec.d;
    table.seed = seed;
    const bool score_type = test != RankTest::kendall;
    std::unique_ptr<detail::ScorePairingCache> cache;
    if (score_type)
        cache = std::make_unique<detail::ScorePairingCache>(test, rs1, rs2_base);

    table.values.resize(draws);
    for (int b = 0; b < draws; ++b) {
        PhiloxEngine rng(seed, static_cast<std::uint64_t>(b));
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(uniform_below(rng, i + 1));
            std::swap(perm[i], perm[j]);
        }
        table.values[b] =
            score_type ? cache->statistic(perm)
                       : detail::pairing_statistic(test, rs1, rs2_base, perm);
    }
    std::sort(table.values.begin(), table.values.end());
    return table;
}

/// All n! pairings; the exact finite-n null law. Limited to n <= 8.
inline NullTable enumerate_null(RankTest test, const Grid& grid1,
                                const Grid& grid2) {
    if (grid1.spec.n != grid2.spec.n)
        throw std::invalid_argument("enumerate_null: mismatched n");
    const int n = grid1.spec.n;
    if (n > 8) throw std::invalid_argument("enumerate_null: n must be <= 8");

    const RanksSigns rs1 =
        ranks_signs_from_images(grid1.points, grid1.spec.n_radii);
    const RanksSigns rs2_base =
        ranks_signs_from_images(grid2.points, grid2.spec.n_radii);

    NullTable table;
    table.test = test;
    table.n = n;
    table.d1 = grid1.spec.d;
    table.d2 = grid2.spec.d;
    table.exhaustive = true;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        table.values.push_back(
            detail::pairing_statistic(test, rs1, rs2_base, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(table.values.begin(), table.values.end());
    return table;
}

/// Add-one Monte Carlo p-value: (1 + #{values >= observed}) / (B + 1).
inline double exact_pvalue(const NullTable& table, double observed) {
    if (table.values.empty())
        throw std::invalid_argument("exact_pvalue: empty table");
    const auto first_ge =
        std::lower_bound(table.values.begin(), table.values.end(), observed);
    const auto count_ge = table.values.end() - first_ge;
    return (1.0 + static_cast<double>(count_ge)) / (table.draws() + 1.0);
}

/// Lower empirical quantile of the table.
inline double null_quantile(const NullTable& table, double p) {
    if (table.values.empty())
        throw std::invalid_argument("null_quantile: empty table");
    const auto draws = static_cast<std::size_t>(table.draws());
    auto index = static_cast<std::size_t>(std::ceil(p * draws));
    if (index > 0) --index;
    return table.values[index];
}

inline std::string null_table_key(RankTest test, int n, int d1, int d2,
                                  std::uint64_t grid_seed, int draws,
                                  std::uint64_t seed, bool exhaustive) {
    std::ostringstream key;
    key << rank_test_name(test) << "_n" << n << "_d" << d1 << "x" << d2
        << "_g" << grid_seed;
    if (exhaustive)
        key << "_exhaustive";
    else
        key << "_B" << draws << "_s" << seed;
    return key.str();
}

inline void write_null_table(const NullTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_null_table: cannot open " + path);
    out << "# " << rank_test_name(table.test) << ',' << table.n << ','
        << table.d1 << ',' << table.d2 << ',' << table.seed << ','
        << table.draws() << ',' << (table.exhaustive ? 1 : 0) << '\n';
    out << std::setprecision(17);
    for (double v : table.values) out << v << '\n';
}

/// Returns false when the file is absent; throws on a malformed file.
inline bool read_null_table(const std::string& path, NullTable& table) {
    std::ifstream in(path);
    if (!in) return false;
    std::string header;
    if (!std::getline(in, header) || header.size() < 2 || header[0] != '#')
        throw std::runtime_error("read_null_table: bad header in " + path);
    std::stringstream fields(header.substr(2));
    std::string name;
    std::getline(fields, name, ',');
    if (name == "sign") table.test = RankTest::sign;
    else if (name == "spearman") table.test = RankTest::spearman;
    else if (name == "kendall") table.test = RankTest::kendall;
    else if (name == "vdw") table.test = RankTest::vdw;
    else throw std::runtime_error("read_null_table: unknown kind " + name);
    char comma;
    int draws = 0, exhaustive = 0;
    fields >> table.n >> comma >> table.d1 >> comma >> table.d2 >> comma >>
        table.seed >> comma >> draws >> comma >> exhaustive;
    table.exhaustive = exhaustive != 0;
    table.values.clear();
    table.values.reserve(draws);
    double value;
    while (in >> value) table.values.push_back(value);
    if (static_cast<int>(table.values.size()) != draws)
        throw std::runtime_error("read_null_table: truncated " + path);
    return true;
}

}  // namespace corank
