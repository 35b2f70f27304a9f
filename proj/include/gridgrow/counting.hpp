#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gridgrow/avoidance.hpp"
#include "gridgrow/bigint.hpp"
#include "gridgrow/cell_matrix.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/grid.hpp"

namespace gridgrow {

/// Nonnegative integer cell occupancies A; weight is the total number of entries.
class WeightMatrix {
public:
    WeightMatrix() = default;
    WeightMatrix(std::size_t columns, std::size_t rows) : entries_(columns, rows, 0) {}
    explicit WeightMatrix(CellMatrix<std::size_t> entries) : entries_(std::move(entries)) {}

    std::size_t columns() const noexcept { return entries_.columns(); }
    std::size_t rows() const noexcept { return entries_.rows(); }
    std::size_t& operator()(std::size_t k, std::size_t l) { return entries_(k, l); }
    std::size_t operator()(std::size_t k, std::size_t l) const { return entries_(k, l); }
    const CellMatrix<std::size_t>& entries() const noexcept { return entries_; }

    std::size_t weight() const { return total_weight(entries_); }
    std::size_t column_sum(std::size_t k) const { return gridgrow::column_sum(entries_, k); }
    std::size_t row_sum(std::size_t l) const { return gridgrow::row_sum(entries_, l); }
    std::size_t max_entry() const {
        const auto& f = entries_.flat();
        return f.empty() ? 0 : *std::max_element(f.begin(), f.end());
    }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;
    friend auto operator<=>(const WeightMatrix& a, const WeightMatrix& b) {
        return a.entries_.flat() <=> b.entries_.flat();
    }

private:
    CellMatrix<std::size_t> entries_;
};

/// supp(A) lies within the nonempty cells and the shapes agree.
inline bool is_admissible(const GridMatrix& grid, const WeightMatrix& a) {
    if (a.columns() != grid.columns() || a.rows() != grid.rows()) return false;
    for (std::size_t k = 0; k < a.columns(); ++k)
        for (std::size_t l = 0; l < a.rows(); ++l)
            if (a(k, l) > 0 && grid.cell(k, l).is_empty()) return false;
    return true;
}

/// Calls fn(const WeightMatrix&) once for every admissible matrix of weight n,
/// in ascending lexicographic order of the flattened entries.
template <typename Fn>
void for_each_weight_matrix(const GridMatrix& grid, std::size_t n, Fn&& fn) {
    const auto support = grid.support();
    WeightMatrix a(grid.columns(), grid.rows());
    const std::size_t m = support.size();

    // Composition walk; the last support cell takes the remainder.
    std::vector<std::size_t> remaining(m + 1, 0);
    remaining[0] = n;
    std::function<void(std::size_t)> place = [&](std::size_t i) {
        const auto [k, l] = support[i];
        if (i + 1 == m) {
            a(k, l) = remaining[i];
            fn(static_cast<const WeightMatrix&>(a));
            a(k, l) = 0;
            return;
        }
        for (std::size_t v = 0; v <= remaining[i]; ++v) {
            a(k, l) = v;
            remaining[i + 1] = remaining[i] - v;
            place(i + 1);
        }
        a(k, l) = 0;
    };
    place(0);
}

inline std::vector<WeightMatrix> admissible_weight_matrices(const GridMatrix& grid, std::size_t n) {
    std::vector<WeightMatrix> out;
    for_each_weight_matrix(grid, n, [&](const WeightMatrix& a) { out.push_back(a); });
    return out;
}

/// C(n + m - 1, m - 1): the number of admissible matrices of weight n over m nonempty cells.
inline BigInt weight_matrix_count(std::size_t nonempty_cells, std::size_t n) {
    return binomial(n + nonempty_cells - 1, nonempty_cells - 1);
}

/// Per-cell class sizes |(M_kl)_m| for m = 0..max_length, computed once per
/// grid and shared read-only. Cells with the same basis share one enumeration.
class CellCountTable {
public:
    CellCountTable() = default;

    CellCountTable(const GridMatrix& grid, std::size_t max_length)
        : max_length_(max_length), counts_(grid.columns(), grid.rows()) {
        std::map<std::string, std::size_t> by_basis;
        for (std::size_t k = 0; k < grid.columns(); ++k) {
            for (std::size_t l = 0; l < grid.rows(); ++l) {
                const auto& c = grid.cell(k, l);
                if (!c.is_av()) continue;
                const auto key = c.basis().to_string();
                auto it = by_basis.find(key);
                if (it == by_basis.end()) {
                    it = by_basis.emplace(key, pool_.size()).first;
                    pool_.push_back(count_av(c.basis(), max_length));
                }
                counts_(k, l) = it->second + 1;
            }
        }
        factorials_.reserve(max_length);
    }

    std::size_t max_length() const noexcept { return max_length_; }
    bool has_counts(std::size_t k, std::size_t l) const { return counts_(k, l) != 0; }

    const BigInt& count(std::size_t k, std::size_t l, std::size_t length) const {
        if (!has_counts(k, l)) throw ContractError("CellCountTable: cell has no class counts");
        if (length > max_length_) throw ContractError("CellCountTable: length exceeds the table");
        return pool_[counts_(k, l) - 1][length];
    }

    const FactorialTable& factorials() const noexcept { return factorials_; }

private:
    std::size_t max_length_ = 0;
    CellMatrix<std::size_t> counts_;  // 1-based index into pool_, 0 = none
    std::vector<CountSequence> pool_;
    FactorialTable factorials_;
};

/// |Grid#_A(M)|: product of column multinomials, row multinomials and cell class sizes.
inline BigInt count_gridded_fixed(const GridMatrix& grid, const WeightMatrix& a, const CellCountTable& table) {
    if (!is_admissible(grid, a)) throw DomainError("weight matrix is not admissible for the grid");
    for (std::size_t k = 0; k < a.columns(); ++k)
        for (std::size_t l = 0; l < a.rows(); ++l)
            if (a(k, l) > 0 && grid.cell(k, l).is_rate())
                throw DomainError("positive weight on a cell given only by its growth rate");
    if (a.max_entry() > table.max_length() || a.weight() > table.factorials().limit())
        throw ContractError("count_gridded_fixed: cell count table is too short for this matrix");

    const auto& fact = table.factorials();
    BigInt result = 1;
    std::vector<std::size_t> parts;
    for (std::size_t k = 0; k < a.columns(); ++k) {
        parts.clear();
        for (std::size_t l = 0; l < a.rows(); ++l) parts.push_back(a(k, l));
        result *= fact.multinomial(parts);
    }
    for (std::size_t l = 0; l < a.rows(); ++l) {
        parts.clear();
        for (std::size_t k = 0; k < a.columns(); ++k) parts.push_back(a(k, l));
        result *= fact.multinomial(parts);
    }
    for (std::size_t k = 0; k < a.columns(); ++k)
        for (std::size_t l = 0; l < a.rows(); ++l)
            if (a(k, l) > 0) result *= table.count(k, l, a(k, l));
    return result;
}

inline BigInt count_gridded_fixed(const GridMatrix& grid, const WeightMatrix& a) {
    return count_gridded_fixed(grid, a, CellCountTable(grid, a.weight()));
}

namespace detail {

inline void require_countable(const GridMatrix& grid) {
    if (!grid.all_countable())
        throw DomainError("exact counting needs every nonempty cell to be an Av(...) class");
}

}  // namespace detail

/// |Grid#_n(M)| as the sum of count_gridded_fixed over all admissible matrices
/// of weight n. With threads > 1 the summands are split across workers.
inline BigInt count_gridded_total(const GridMatrix& grid, std::size_t n, const CellCountTable& table,
                                  unsigned threads = 1) {
    detail::require_countable(grid);
    if (threads <= 1) {
        BigInt total = 0;
        for_each_weight_matrix(grid, n, [&](const WeightMatrix& a) { total += count_gridded_fixed(grid, a, table); });
        return total;
    }
    const auto matrices = admissible_weight_matrices(grid, n);
    std::vector<BigInt> partial(threads, BigInt(0));
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < matrices.size(); i += threads)
                    partial[w] += count_gridded_fixed(grid, matrices[i], table);
            });
        }
    }
    BigInt total = 0;
    for (const auto& p : partial) total += p;
    return total;
}

inline BigInt count_gridded_total(const GridMatrix& grid, std::size_t n) {
    return count_gridded_total(grid, n, CellCountTable(grid, n));
}

struct WeightMaximizer {
    WeightMatrix matrix;
    BigInt count;
};

/// The admissible weight-n matrix with the largest gridded count; ties go
/// to the lexicographically smallest flattened matrix.
inline WeightMaximizer argmax_weight_matrix(const GridMatrix& grid, std::size_t n, const CellCountTable& table) {
    detail::require_countable(grid);
    WeightMaximizer best{WeightMatrix(grid.columns(), grid.rows()), BigInt(-1)};
    for_each_weight_matrix(grid, n, [&](const WeightMatrix& a) {
        BigInt c = count_gridded_fixed(grid, a, table);
        if (c > best.count) best = {a, std::move(c)};
    });
    return best;
}

inline WeightMaximizer argmax_weight_matrix(const GridMatrix& grid, std::size_t n) {
    return argmax_weight_matrix(grid, n, CellCountTable(grid, n));
}

}  // namespace gridgrow
