// Construction of the symmetric grid on the unit ball that discretizes the
// spherical uniform distribution: nR equispaced radii times an antipodally
// paired array of nS directions, with seeded tie-break points when n does
// not factorize exactly.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/rng.hpp"

namespace corank {

using Vec = std::vector<double>;

struct GridSpec {
    int n = 0;
    int d = 0;
    int n_radii = 0;
    int n_directions = 0;
    int n_leftover = 0;
};

/// Factorize n = nR * nS + n0 with nS even and 0 <= n0 < min(nR, nS).
/// Among valid pairs: minimize n0 first, then |nR - nS|, preferring
/// nS >= nR on remaining ties.
inline GridSpec factorize(int n, int d) {
    if (n < 4) throw std::invalid_argument("factorize: n must be at least 4");
    if (d < 1) throw std::invalid_argument("factorize: d must be positive");

    if (d == 1) {
        // The 0-sphere has exactly two points, so nS = 2 is forced.
        GridSpec spec{n, d, n / 2, 2, n % 2};
        return spec;
    }

    int best_r = -1, best_s = -1, best_n0 = std::numeric_limits<int>::max();
    for (int r = 1; r <= n; ++r) {
        for (int s = 2; r * s <= n; s += 2) {
            const int n0 = n - r * s;
            if (n0 >= std::min(r, s)) continue;
            const bool better =
                n0 < best_n0 ||
                (n0 == best_n0 &&
                 (std::abs(r - s) < std::abs(best_r - best_s) ||
                  (std::abs(r - s) == std::abs(best_r - best_s) &&
                   s >= r && best_s < best_r)));
            if (better) {
                best_r = r;
                best_s = s;
                best_n0 = n0;
            }
        }
    }
    if (best_r < 0) throw std::runtime_error("factorize: no valid split");
    return GridSpec{n, d, best_r, best_s, best_n0};
}

struct SphereArray {
    int d = 0;
    std::vector<Vec> directions;  // antipodal pairs: k + nS/2 == -k
};

/// nS unit vectors on the (d-1)-sphere in antipodal pairs. For d = 2 the
/// array is the equispaced-angle set starting at angle 0; for d >= 3 the
/// first half is a seeded quasi-uniform draw and the second half its exact
/// negation.
inline SphereArray sphere_array(int d, int n_directions, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("sphere_array: d must be positive");
    if (n_directions < 2 || n_directions % 2 != 0)
        throw std::invalid_argument("sphere_array: nS must be even and >= 2");
    if (d == 1 && n_directions != 2)
        throw std::invalid_argument("sphere_array: d = 1 requires nS = 2");

    SphereArray arr;
    arr.d = d;
    const int half = n_directions / 2;
    arr.directions.resize(n_directions);

    if (d == 1) {
        arr.directions[0] = {1.0};
        arr.directions[1] = {-1.0};
        return arr;
    }
    if (d == 2) {
        for (int k = 0; k < half; ++k) {
            const double angle = 2.0 * 3.14159265358979323846 * k / n_directions;
            arr.directions[k] = {std::cos(angle), std::sin(angle)};
        }
    } else {
        PhiloxEngine rng(seed, /*stream=*/0);
        NormalSampler normal(rng);
        for (int k = 0; k < half; ++k) {
            Vec v(d);
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    v[j] = normal();
                    norm2 += v[j] * v[j];
                }
            } while (norm2 < 1e-12);
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& x : v) x *= inv;
            arr.directions[k] = std::move(v);
        }
    }
    for (int k = 0; k < half; ++k) {
        Vec neg(arr.directions[k]);
        for (double& x : neg) x = -x;
        arr.directions[half + k] = std::move(neg);
    }
    return arr;
}

struct Grid {
    GridSpec spec;
    std::vector<Vec> points;
    std::uint64_t seed = 0;  // meaningful iff spec.n_leftover > 0 or d >= 3
};

/// Assemble the grid: radii r/(nR+1) times the direction array, plus -- when
/// n0 > 0 -- n0 tie-break points at radius 1/(2(nR+1)) along directions
/// drawn without replacement from the array.
inline Grid build_grid(const GridSpec& spec, std::uint64_t seed) {
    if (spec.n != spec.n_radii * spec.n_directions + spec.n_leftover ||
        spec.n_leftover < 0 ||
        spec.n_leftover >= std::min(spec.n_radii, spec.n_directions) ||
        spec.n_directions % 2 != 0)
        throw std::invalid_argument("build_grid: invalid GridSpec");

    const SphereArray arr = sphere_array(spec.d, spec.n_directions, seed);
    Grid grid;
    grid.spec = spec;
    grid.seed = seed;
    grid.points.reserve(spec.n);
    for (int r = 1; r <= spec.n_radii; ++r) {
        const double radius = static_cast<double>(r) / (spec.n_radii + 1);
        for (const Vec& s : arr.directions) {
            Vec p(s);
            for (double& x : p) x *= radius;
            grid.points.push_back(std::move(p));
        }
    }
    if (spec.n_leftover > 0) {
        // Tie-break device: replace the n0 origin copies by points just
        // inside the first radial shell, along distinct random directions.
        PhiloxEngine rng(seed, /*stream=*/1);
        std::vector<int> pool(spec.n_directions);
        for (int k = 0; k < spec.n_directions; ++k) pool[k] = k;
        const double radius = 1.0 / (2.0 * (spec.n_radii + 1));
        for (int t = 0; t < spec.n_leftover; ++t) {
            const auto pick = static_cast<std::size_t>(
                uniform_below(rng, pool.size() - t));
            std::swap(pool[pick], pool[pool.size() - 1 - t]);
            Vec p(arr.directions[pool[pool.size() - 1 - t]]);
            for (double& x : p) x *= radius;
            grid.points.push_back(std::move(p));
        }
    }
    return grid;
}

inline Grid build_grid(int n, int d, std::uint64_t seed) {
    return build_grid(factorize(n, d), seed);
}

/// One point per row, d columns, 17 significant digits.
inline void write_grid_csv(const Grid& grid, std::ostream& out) {
    out << std::setprecision(17);
    for (const Vec& p : grid.points) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out << ',';
            out << p[j];
        }
        out << '\n';
    }
}

inline void write_grid_csv(const Grid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_grid_csv: cannot open " + path);
    write_grid_csv(grid, out);
}

/// Read back a point set written by write_grid_csv. Only the points are
/// recoverable; spec fields other than (n, d) are left zero.
inline std::vector<Vec> read_points_csv(std::istream& in) {
    std::vector<Vec> points;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Vec p;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            std::size_t used = 0;
            p.push_back(std::stod(cell, &used));
            if (used != cell.size())
                throw std::runtime_error("read_points_csv: bad cell '" + cell + "'");
        }
        if (!points.empty() && p.size() != points.front().size())
            throw std::runtime_error("read_points_csv: ragged rows");
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace corank
