#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code paths with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "gridgrow/cell_matrix.hpp"
#include "gridgrow/grid.hpp"
#include "gridgrow/permutation.hpp"

namespace oracle {

/// All permutations of length n, as value vectors 1..n.
inline std::vector<std::vector<int>> all_permutations(std::size_t n) {
    std::vector<int> e(n);
    std::iota(e.begin(), e.end(), 1);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(e);
    } while (std::next_permutation(e.begin(), e.end()));
    return out;
}

inline bool same_shape(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] < a[j]) != (b[i] < b[j])) return false;
    return true;
}

/// Tries every k-subset of host positions.
inline bool naive_contains(const std::vector<int>& pattern, const std::vector<int>& host) {
    const std::size_t k = pattern.size(), n = host.size();
    if (k == 0) return true;
    if (k > n) return false;
    std::vector<bool> choose(n, false);
    std::fill(choose.begin(), choose.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
        std::vector<int> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (choose[i]) sub.push_back(host[i]);
        if (same_shape(sub, pattern)) return true;
    } while (std::prev_permutation(choose.begin(), choose.end()));
    return false;
}

inline std::vector<int> entries(const gridgrow::Permutation& p) { return {p.entries().begin(), p.entries().end()}; }

inline bool naive_avoids(const gridgrow::Basis& basis, const std::vector<int>& host) {
    for (const auto& b : basis.patterns())
        if (naive_contains(entries(b), host)) return false;
    return true;
}

/// Number of length-m permutations avoiding the basis, by filtering all m!.
inline std::size_t filter_count(const gridgrow::Basis& basis, std::size_t m) {
    std::size_t c = 0;
    for (const auto& p : all_permutations(m))
        if (naive_avoids(basis, p)) ++c;
    return c;
}

struct NaiveGridded {
    std::vector<int> perm;
    std::vector<std::size_t> cols;  // 1-based divisions, t+1 entries
    std::vector<std::size_t> rows;  // 1-based divisions, u+1 entries
    gridgrow::CellMatrix<std::size_t> occupancy;
};

inline void divisions(std::size_t parts, std::size_t n, std::vector<std::size_t>& cur,
                      std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == parts) {
        auto d = cur;
        d.push_back(n + 1);
        out.push_back(d);
        return;
    }
    const std::size_t lo = cur.back();
    for (std::size_t v = lo; v <= n + 1; ++v) {
        cur.push_back(v);
        divisions(parts, n, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<std::size_t>> all_divisions(std::size_t parts, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur{1};
    divisions(parts, n, cur, out);
    return out;
}

/// Every (permutation, gridding) pair of length n for a grid of Av cells.
inline std::vector<NaiveGridded> all_gridded(const gridgrow::GridMatrix& grid, std::size_t n) {
    const std::size_t t = grid.columns(), u = grid.rows();
    const auto col_divs = all_divisions(t, n);
    const auto row_divs = all_divisions(u, n);
    std::vector<NaiveGridded> out;
    for (const auto& perm : all_permutations(n)) {
        for (const auto& cd : col_divs) {
            for (const auto& rd : row_divs) {
                gridgrow::CellMatrix<std::size_t> occ(t, u, 0);
                bool ok = true;
                for (std::size_t k = 0; k < t && ok; ++k) {
                    for (std::size_t l = 0; l < u && ok; ++l) {
                        std::vector<int> sub;
                        for (std::size_t i = cd[k]; i < cd[k + 1]; ++i) {
                            const auto v = static_cast<std::size_t>(perm[i - 1]);
                            if (v >= rd[l] && v < rd[l + 1]) sub.push_back(perm[i - 1]);
                        }
                        occ(k, l) = sub.size();
                        const auto& cell = grid.cell(k, l);
                        if (cell.is_empty())
                            ok = sub.empty();
                        else
                            ok = naive_avoids(cell.basis(), sub);
                    }
                }
                if (ok) out.push_back({perm, cd, rd, occ});
            }
        }
    }
    return out;
}

/// Random Gamma: 1..5 columns and rows, entries 0 (probability ~0.3) or uniform in [1, 3],
/// at least one positive entry.
template <typename Rng>
gridgrow::RealMatrix random_gamma(Rng& rng, std::size_t max_dim = 5) {
    std::uniform_int_distribution<std::size_t> dim(1, max_dim);
    std::uniform_real_distribution<double> val(1.0, 3.0);
    std::bernoulli_distribution zero(0.3);
    const std::size_t t = dim(rng), u = dim(rng);
    gridgrow::RealMatrix g(t, u, 0.0);
    bool any = false;
    while (!any) {
        for (auto& v : g.flat()) {
            v = zero(rng) ? 0.0 : val(rng);
            any = any || v > 0.0;
        }
    }
    return g;
}

/// Two-sided brute force for the largest eigenvalue of a small symmetric matrix:
/// Jacobi rotations until the off-diagonal mass vanishes.
inline double jacobi_max_eigenvalue(std::vector<double> a, std::size_t d) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) off += a[i * d + j] * a[i * d + j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a[p * d + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                const double tt = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tt * tt + 1.0), s = tt * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a[k * d + p], akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a[p * d + k], aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    double best = a[0];
    for (std::size_t i = 1; i < d; ++i) best = std::max(best, a[i * d + i]);
    return best;
}

}  // namespace oracle
