// Empirical center-outward distribution function: least-squares optimal
// pairing of a sample with the grid, and the ranks and signs it induces.
#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "corank/assignment.hpp"
#include "corank/grid.hpp"

namespace corank {

/// Squared-distance cost matrix, entry (i, j) = ||sample_i - grid_j||^2.
inline CostMatrix cost_matrix(const std::vector<Vec>& sample, const Grid& grid) {
    const int n = static_cast<int>(sample.size());
    if (n != grid.spec.n)
        throw std::invalid_argument("cost_matrix: sample/grid size mismatch");
    const int d = grid.spec.d;
    std::vector<double> entries(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(sample[i].size()) != d)
            throw std::invalid_argument("cost_matrix: dimension mismatch");
        for (int j = 0; j < n; ++j) {
            double dist2 = 0.0;
            const Vec& g = grid.points[j];
            for (int k = 0; k < d; ++k) {
                const double diff = sample[i][k] - g[k];
                dist2 += diff * diff;
            }
            entries[static_cast<std::size_t>(i) * n + j] = dist2;
        }
    }
    return CostMatrix(n, std::move(entries));
}

struct RanksSigns {
    std::vector<Vec> images;           // F(Z_i), a grid point per observation
    std::vector<double> rescaled_ranks;  // ||F(Z_i)||, in (0, 1)
    std::vector<double> ranks;           // (nR + 1) * rescaled rank
    std::vector<Vec> signs;              // F(Z_i) / ||F(Z_i)||
    int n_radii = 0;
};

/// Build ranks and signs from already-chosen images. Used directly by the
/// null simulator, where the images are a permutation of the grid itself.
inline RanksSigns ranks_signs_from_images(std::vector<Vec> images, int n_radii) {
    RanksSigns rs;
    rs.n_radii = n_radii;
    rs.images = std::move(images);
    rs.rescaled_ranks.reserve(rs.images.size());
    rs.ranks.reserve(rs.images.size());
    rs.signs.reserve(rs.images.size());
    for (const Vec& img : rs.images) {
        double norm2 = 0.0;
        for (double x : img) norm2 += x * x;
        const double norm = std::sqrt(norm2);
        if (norm == 0.0)
            throw std::invalid_argument(
                "ranks_signs_from_images: zero image (grid not tie-broken?)");
        rs.rescaled_ranks.push_back(norm);
        rs.ranks.push_back((n_radii + 1) * norm);
        Vec sign(img);
        for (double& x : sign) x /= norm;
        rs.signs.push_back(std::move(sign));
    }
    return rs;
}

/// The center-outward map: optimal assignment of the sample to the grid.
/// Duplicate sample points are rejected; the theory assumes continuous data
/// and duplicates make the optimal pairing non-unique.
inline RanksSigns center_outward(const std::vector<Vec>& sample, const Grid& grid) {
    const std::size_t n = sample.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (sample[i] == sample[j])
                throw std::invalid_argument(
                    "center_outward: duplicate sample points");

    const Assignment assignment = solve_assignment(cost_matrix(sample, grid));
    std::vector<Vec> images(n);
    for (std::size_t i = 0; i < n; ++i)
        images[i] = grid.points[assignment.perm[i]];
    return ranks_signs_from_images(std::move(images), grid.spec.n_radii);
}

/// Debug dump: index, rank, rescaled rank, sign components.
inline void write_ranks_signs_csv(const RanksSigns& rs, std::ostream& out) {
    out << std::setprecision(17);
    for (std::size_t i = 0; i < rs.images.size(); ++i) {
        out << i << ',' << rs.ranks[i] << ',' << rs.rescaled_ranks[i];
        for (double s : rs.signs[i]) out << ',' << s;
        out << '\n';
    }
}

}  // namespace corank
