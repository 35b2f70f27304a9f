#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gridgrow/avoidance.hpp"
#include "gridgrow/bigint.hpp"
#include "gridgrow/counting.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/grid.hpp"
#include "gridgrow/permutation.hpp"

namespace gridgrow {

/// A permutation with one fixed gridding. Divisions are 1-based:
/// column_divisions = c_1..c_{t+1} with c_1 = 1 and c_{t+1} = n + 1,
/// and likewise for rows.
struct GriddedPermutation {
    Permutation perm;
    std::vector<std::size_t> column_divisions;
    std::vector<std::size_t> row_divisions;

    friend bool operator==(const GriddedPermutation&, const GriddedPermutation&) = default;
    friend auto operator<=>(const GriddedPermutation&, const GriddedPermutation&) = default;
};

struct BruteForceCaps {
    std::size_t membership = 10;
    std::size_t ungridded = 7;
};

/// Entries of the permutation that fall in cell (k, l), in index order.
inline std::vector<int> cell_contents(const GriddedPermutation& g, std::size_t k, std::size_t l) {
    std::vector<int> out;
    const auto lo_v = static_cast<int>(g.row_divisions[l]);
    const auto hi_v = static_cast<int>(g.row_divisions[l + 1]);
    for (std::size_t i = g.column_divisions[k]; i < g.column_divisions[k + 1]; ++i) {
        const int v = g.perm[i - 1];
        if (v >= lo_v && v < hi_v) out.push_back(v);
    }
    return out;
}

namespace detail {

inline bool valid_divisions(const std::vector<std::size_t>& d, std::size_t parts, std::size_t n) {
    if (d.size() != parts + 1 || d.front() != 1 || d.back() != n + 1) return false;
    return std::is_sorted(d.begin(), d.end());
}

inline bool cell_accepts(const CellSpec& cell, const std::vector<int>& contents) {
    if (cell.is_empty()) return contents.empty();
    if (cell.is_rate()) throw DomainError("cells given only by a growth rate have no membership test");
    if (contents.empty()) return true;
    return avoids_all(cell.basis(), Permutation::standardize(std::span<const int>(contents)));
}

/// Calls fn(divisions) for every 1 = d_1 <= ... <= d_{parts+1} = n + 1.
template <typename Fn>
void for_each_division(std::size_t parts, std::size_t n, Fn&& fn) {
    std::vector<std::size_t> d(parts + 1, 1);
    d.back() = n + 1;
    if (parts == 1) {
        fn(static_cast<const std::vector<std::size_t>&>(d));
        return;
    }
    // Odometer over the interior divisions d_2..d_parts, kept nondecreasing.
    while (true) {
        fn(static_cast<const std::vector<std::size_t>&>(d));
        std::size_t i = parts - 1;
        while (i >= 1 && d[i] == n + 1) --i;
        if (i == 0) return;
        ++d[i];
        for (std::size_t j = i + 1; j < parts; ++j) d[j] = d[i];
    }
}

inline void require_countable_cells(const GridMatrix& grid) {
    if (!grid.all_countable())
        throw DomainError("brute-force membership needs every nonempty cell to be an Av(...) class");
}

/// Calls fn(gridded) for every valid gridding of perm; fn returns false to stop.
template <typename Fn>
void for_each_gridding(const GridMatrix& grid, const Permutation& perm, Fn&& fn) {
    const std::size_t n = perm.size();
    GriddedPermutation g{perm, {}, {}};
    bool stop = false;
    for_each_division(grid.columns(), n, [&](const std::vector<std::size_t>& cols) {
        if (stop) return;
        g.column_divisions = cols;
        for_each_division(grid.rows(), n, [&](const std::vector<std::size_t>& rows) {
            if (stop) return;
            g.row_divisions = rows;
            for (std::size_t k = 0; k < grid.columns(); ++k)
                for (std::size_t l = 0; l < grid.rows(); ++l)
                    if (!cell_accepts(grid.cell(k, l), cell_contents(g, k, l))) return;
            if (!fn(static_cast<const GriddedPermutation&>(g))) stop = true;
        });
    });
}

inline void check_cap(std::size_t n, std::size_t cap, const char* what) {
    if (n > cap)
        throw ResourceError(std::string(what) + ": length " + std::to_string(n) + " exceeds the brute-force cap " +
                            std::to_string(cap));
}

}  // namespace detail

/// Re-checks the gridding invariant: division shapes, and every cell's
/// contents order isomorphic to a member of its class.
inline bool is_valid_gridding(const GridMatrix& grid, const GriddedPermutation& g) {
    const std::size_t n = g.perm.size();
    if (!detail::valid_divisions(g.column_divisions, grid.columns(), n)) return false;
    if (!detail::valid_divisions(g.row_divisions, grid.rows(), n)) return false;
    for (std::size_t k = 0; k < grid.columns(); ++k)
        for (std::size_t l = 0; l < grid.rows(); ++l)
            if (!detail::cell_accepts(grid.cell(k, l), cell_contents(g, k, l))) return false;
    return true;
}

/// Searches every pair of division sequences for a witness gridding.
inline std::optional<GriddedPermutation> brute_force_membership(const GridMatrix& grid, const Permutation& perm,
                                                                std::size_t cap = BruteForceCaps{}.membership) {
    detail::check_cap(perm.size(), cap, "brute_force_membership");
    detail::require_countable_cells(grid);
    std::optional<GriddedPermutation> found;
    detail::for_each_gridding(grid, perm, [&](const GriddedPermutation& g) {
        found = g;
        return false;
    });
    return found;
}

/// |Grid_n(M)| by testing all n! permutations.
inline BigInt count_ungridded(const GridMatrix& grid, std::size_t n, std::size_t cap = BruteForceCaps{}.ungridded) {
    detail::check_cap(n, cap, "count_ungridded");
    detail::require_countable_cells(grid);
    auto p = Permutation::identity(n);
    std::vector<int> e(p.entries().begin(), p.entries().end());
    BigInt count = 0;
    do {
        if (brute_force_membership(grid, Permutation(e), n)) count += 1;
    } while (std::next_permutation(e.begin(), e.end()));
    return count;
}

/// |Grid#_n(M)| by counting every (permutation, gridding) pair directly.
/// Independent of the multinomial formula; used as its oracle.
inline BigInt count_gridded_brute_force(const GridMatrix& grid, std::size_t n,
                                        std::size_t cap = BruteForceCaps{}.ungridded) {
    detail::check_cap(n, cap, "count_gridded_brute_force");
    detail::require_countable_cells(grid);
    auto p = Permutation::identity(n);
    std::vector<int> e(p.entries().begin(), p.entries().end());
    BigInt count = 0;
    do {
        detail::for_each_gridding(grid, Permutation(e), [&](const GriddedPermutation&) {
            count += 1;
            return true;
        });
    } while (std::next_permutation(e.begin(), e.end()));
    return count;
}

/// Materialized members (M_kl)_m of each cell class, for sampling.
class CellListTable {
public:
    CellListTable(const GridMatrix& grid, std::size_t max_length, std::size_t budget = EnumerateOptions{}.list_budget)
        : max_length_(max_length), index_(grid.columns(), grid.rows()) {
        std::map<std::string, std::size_t> by_basis;
        EnumerateOptions opts{true, budget};
        for (std::size_t k = 0; k < grid.columns(); ++k) {
            for (std::size_t l = 0; l < grid.rows(); ++l) {
                const auto& c = grid.cell(k, l);
                if (!c.is_av()) continue;
                const auto key = c.basis().to_string();
                auto it = by_basis.find(key);
                if (it == by_basis.end()) {
                    it = by_basis.emplace(key, pool_.size()).first;
                    pool_.push_back(enumerate_av(c.basis(), max_length, opts).lists);
                }
                index_(k, l) = it->second + 1;
            }
        }
    }

    std::size_t max_length() const noexcept { return max_length_; }

    const std::vector<Permutation>& members(std::size_t k, std::size_t l, std::size_t length) const {
        if (index_(k, l) == 0) throw ContractError("CellListTable: cell has no member lists");
        if (length > max_length_) throw ContractError("CellListTable: length exceeds the table");
        return pool_[index_(k, l) - 1][length];
    }

private:
    std::size_t max_length_;
    CellMatrix<std::size_t> index_;
    std::vector<std::vector<std::vector<Permutation>>> pool_;
};

namespace detail {

/// A uniformly random arrangement of the multiset {label l repeated counts[l] times}.
template <typename Rng>
std::vector<std::size_t> random_arrangement(const std::vector<std::size_t>& counts, Rng& rng) {
    std::vector<std::size_t> seq;
    for (std::size_t label = 0; label < counts.size(); ++label) seq.insert(seq.end(), counts[label], label);
    std::shuffle(seq.begin(), seq.end(), rng);
    return seq;
}

}  // namespace detail

/// Uniform draw from Grid#_A(M). Each column gets a random horizontal
/// interleaving of its cells, each row a random vertical interleaving, and
/// each cell a random member of its class of the right length; the three
/// choices are independent and together biject onto Grid#_A(M).
template <typename Rng>
GriddedPermutation sample_gridded(const GridMatrix& grid, const WeightMatrix& a, const CellListTable& lists, Rng& rng) {
    if (!is_admissible(grid, a)) throw DomainError("weight matrix is not admissible for the grid");
    const std::size_t t = grid.columns(), u = grid.rows();
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t l = 0; l < u; ++l)
            if (a(k, l) > 0 && grid.cell(k, l).is_rate())
                throw DomainError("positive weight on a cell given only by its growth rate");
    if (a.max_entry() > lists.max_length()) throw ContractError("sample_gridded: member lists are too short");

    const std::size_t n = a.weight();
    GriddedPermutation g;
    g.column_divisions.assign(t + 1, 1);
    g.row_divisions.assign(u + 1, 1);
    for (std::size_t k = 0; k < t; ++k) g.column_divisions[k + 1] = g.column_divisions[k] + a.column_sum(k);
    for (std::size_t l = 0; l < u; ++l) g.row_divisions[l + 1] = g.row_divisions[l] + a.row_sum(l);

    // Global positions (0-based) and values (0-based) assigned to each cell, in increasing order.
    CellMatrix<std::vector<std::size_t>> positions(t, u), values(t, u);
    for (std::size_t k = 0; k < t; ++k) {
        std::vector<std::size_t> counts(u);
        for (std::size_t l = 0; l < u; ++l) counts[l] = a(k, l);
        const auto seq = detail::random_arrangement(counts, rng);
        for (std::size_t i = 0; i < seq.size(); ++i) positions(k, seq[i]).push_back(g.column_divisions[k] - 1 + i);
    }
    for (std::size_t l = 0; l < u; ++l) {
        std::vector<std::size_t> counts(t);
        for (std::size_t k = 0; k < t; ++k) counts[k] = a(k, l);
        const auto seq = detail::random_arrangement(counts, rng);
        for (std::size_t i = 0; i < seq.size(); ++i) values(seq[i], l).push_back(g.row_divisions[l] - 1 + i);
    }

    std::vector<int> entries(n, 0);
    for (std::size_t k = 0; k < t; ++k) {
        for (std::size_t l = 0; l < u; ++l) {
            const std::size_t m = a(k, l);
            if (m == 0) continue;
            const auto& pool = lists.members(k, l, m);
            if (pool.empty()) throw DomainError("cell class has no member of the requested length");
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            const auto& sigma = pool[pick(rng)];
            for (std::size_t i = 0; i < m; ++i)
                entries[positions(k, l)[i]] = static_cast<int>(values(k, l)[sigma[i] - 1] + 1);
        }
    }
    g.perm = Permutation(std::move(entries));
    return g;
}

inline GriddedPermutation sample_gridded(const GridMatrix& grid, const WeightMatrix& a, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_gridded(grid, a, CellListTable(grid, a.max_entry()), rng);
}

}  // namespace gridgrow
