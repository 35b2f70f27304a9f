#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gridgrow/errors.hpp"

namespace gridgrow {

/// Zero-based Cartesian cell index: column from the left, row from the bottom.
struct CellIndex {
    std::size_t column = 0;
    std::size_t row = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// A t x u matrix indexed Cartesian-style, (k, l) = (column, row).
///
/// Storage is column-major with the bottom row first, so `flat()` is the
/// order used whenever matrices are compared lexicographically.
template <typename T>
class CellMatrix {
public:
    CellMatrix() = default;

    CellMatrix(std::size_t columns, std::size_t rows, const T& fill = T{})
        : columns_(columns), rows_(rows), data_(columns * rows, fill) {}

    CellMatrix(std::size_t columns, std::size_t rows, std::vector<T> flat)
        : columns_(columns), rows_(rows), data_(std::move(flat)) {
        if (data_.size() != columns_ * rows_)
            throw ContractError("CellMatrix: flat data does not match the shape");
    }

    std::size_t columns() const noexcept { return columns_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator()(std::size_t k, std::size_t l) { return data_[k * rows_ + l]; }
    const T& operator()(std::size_t k, std::size_t l) const { return data_[k * rows_ + l]; }
    T& operator[](CellIndex i) { return (*this)(i.column, i.row); }
    const T& operator[](CellIndex i) const { return (*this)(i.column, i.row); }

    const std::vector<T>& flat() const noexcept { return data_; }
    std::vector<T>& flat() noexcept { return data_; }

    CellIndex index_of(std::size_t flat_position) const {
        return {flat_position / rows_, flat_position % rows_};
    }

    friend bool operator==(const CellMatrix&, const CellMatrix&) = default;

private:
    std::size_t columns_ = 0;
    std::size_t rows_ = 0;
    std::vector<T> data_;
};

using RealMatrix = CellMatrix<double>;

/// Sum of column k.
template <typename T>
T column_sum(const CellMatrix<T>& m, std::size_t k) {
    T s{};
    for (std::size_t l = 0; l < m.rows(); ++l) s += m(k, l);
    return s;
}

/// Sum of row l.
template <typename T>
T row_sum(const CellMatrix<T>& m, std::size_t l) {
    T s{};
    for (std::size_t k = 0; k < m.columns(); ++k) s += m(k, l);
    return s;
}

template <typename T>
T total_weight(const CellMatrix<T>& m) {
    T s{};
    for (const auto& v : m.flat()) s += v;
    return s;
}

}  // namespace gridgrow
