// Exact dense linear assignment via shortest augmenting paths
// (Jonker-Volgenant style), O(n^3) worst case, deterministic tie-breaking.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace corank {

struct Assignment {
    std::vector<int> perm;  // row i assigned to column perm[i]
    double total_cost = 0.0;
};

/// Row-major square cost matrix of finite nonnegative entries.
class CostMatrix {
public:
    CostMatrix(int n, std::vector<double> entries)
        : n_(n), entries_(std::move(entries)) {
        if (n_ < 1 || entries_.size() != static_cast<std::size_t>(n_) * n_)
            throw std::invalid_argument("CostMatrix: size mismatch");
        for (double c : entries_)
            if (!std::isfinite(c) || c < 0.0)
                throw std::invalid_argument(
                    "CostMatrix: entries must be finite and nonnegative");
    }

    int size() const { return n_; }
    double operator()(int i, int j) const {
        return entries_[static_cast<std::size_t>(i) * n_ + j];
    }
    const double* row(int i) const {
        return entries_.data() + static_cast<std::size_t>(i) * n_;
    }

private:
    int n_;
    std::vector<double> entries_;
};

/// Cost-minimizing permutation. Rows are augmented in index order and each
/// Dijkstra scan picks the lowest-index minimizer, so the output is a pure
/// function of the input matrix.
inline Assignment solve_assignment(const CostMatrix& costs) {
    const int n = costs.size();
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);  // 1-based columns

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            const double* row = costs.row(i0 - 1);
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = row[j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    Assignment result;
    result.perm.assign(n, -1);
    for (int j = 1; j <= n; ++j) result.perm[match[j] - 1] = j - 1;
    double cost = 0.0, comp = 0.0;
    for (int i = 0; i < n; ++i) {
        // Kahan accumulation keeps the reported cost reproducible.
        const double y = costs(i, result.perm[i]) - comp;
        const double t = cost + y;
        comp = (t - cost) - y;
        cost = t;
    }
    result.total_cost = cost;
    return result;
}

}  // namespace corank
