#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridgrow/cell_matrix.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/permutation.hpp"

namespace gridgrow {

struct EmptyCell {
    friend bool operator==(const EmptyCell&, const EmptyCell&) = default;
};

struct AvCell {
    Basis basis;
    friend bool operator==(const AvCell&, const AvCell&) = default;
};

/// A cell given only by its growth rate; it cannot be counted exactly.
struct RateCell {
    double growth_rate = 1.0;
    friend bool operator==(const RateCell&, const RateCell&) = default;
};

/// Contents of one grid cell: empty, a finitely based class, or a bare growth rate.
class CellSpec {
public:
    CellSpec() = default;

    static CellSpec empty() { return CellSpec(); }

    /// Av(1) is the empty class and normalizes to an empty cell.
    static CellSpec av(Basis basis) {
        for (const auto& p : basis.patterns())
            if (p.size() == 1) return empty();
        CellSpec c;
        c.value_ = AvCell{std::move(basis)};
        return c;
    }

    static CellSpec rate(double gr) {
        if (!std::isfinite(gr) || gr < 1.0)
            throw DomainError("growth rate of a nonempty cell must be a finite value >= 1");
        CellSpec c;
        c.value_ = RateCell{gr};
        return c;
    }

    bool is_empty() const noexcept { return std::holds_alternative<EmptyCell>(value_); }
    bool is_av() const noexcept { return std::holds_alternative<AvCell>(value_); }
    bool is_rate() const noexcept { return std::holds_alternative<RateCell>(value_); }

    const Basis& basis() const { return std::get<AvCell>(value_).basis; }
    double growth_rate() const { return std::get<RateCell>(value_).growth_rate; }

    /// Grid-file token for this cell.
    std::string to_string() const {
        if (is_empty()) return ".";
        if (is_av()) return basis().to_string();
        std::ostringstream os;
        os.precision(17);
        os << "gr=" << growth_rate();
        return os.str();
    }

    friend bool operator==(const CellSpec&, const CellSpec&) = default;

private:
    std::variant<EmptyCell, AvCell, RateCell> value_;
};

/// A t x u matrix of cell classes, Cartesian indexed. At least one cell is nonempty.
class GridMatrix {
public:
    explicit GridMatrix(CellMatrix<CellSpec> cells) : cells_(std::move(cells)) {
        if (cells_.columns() == 0 || cells_.rows() == 0)
            throw ContractError("GridMatrix: needs at least one column and one row");
        bool any = false;
        for (const auto& c : cells_.flat()) any = any || !c.is_empty();
        if (!any) throw ContractError("GridMatrix: all cells are empty");
    }

    /// Builds from display rows, top row first (as a grid file is written).
    static GridMatrix from_display_rows(const std::vector<std::vector<CellSpec>>& rows) {
        if (rows.empty() || rows.front().empty()) throw ContractError("GridMatrix: no cells");
        const std::size_t u = rows.size();
        const std::size_t t = rows.front().size();
        CellMatrix<CellSpec> cells(t, u);
        for (std::size_t i = 0; i < u; ++i) {
            if (rows[i].size() != t) throw ContractError("GridMatrix: ragged rows");
            for (std::size_t k = 0; k < t; ++k) cells(k, u - 1 - i) = rows[i][k];
        }
        return GridMatrix(std::move(cells));
    }

    std::size_t columns() const noexcept { return cells_.columns(); }
    std::size_t rows() const noexcept { return cells_.rows(); }
    const CellSpec& cell(std::size_t k, std::size_t l) const { return cells_(k, l); }
    const CellSpec& operator[](CellIndex i) const { return cells_[i]; }
    const CellMatrix<CellSpec>& cells() const noexcept { return cells_; }

    /// Nonempty cells in flat (column-major, bottom row first) order.
    std::vector<CellIndex> support() const {
        std::vector<CellIndex> s;
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (!cells_.flat()[i].is_empty()) s.push_back(cells_.index_of(i));
        return s;
    }

    bool all_countable() const {
        for (const auto& c : cells_.flat())
            if (c.is_rate()) return false;
        return true;
    }

    /// Grid-file text, top row first.
    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < rows(); ++i) {
            const std::size_t l = rows() - 1 - i;
            for (std::size_t k = 0; k < columns(); ++k) {
                if (k > 0) s += ' ';
                s += cell(k, l).to_string();
            }
            s += '\n';
        }
        return s;
    }

    friend bool operator==(const GridMatrix&, const GridMatrix&) = default;

private:
    CellMatrix<CellSpec> cells_;
};

namespace detail {

inline CellSpec parse_cell_token(std::string_view tok, std::size_t line, std::size_t column) {
    if (tok == ".") return CellSpec::empty();
    if (tok == "inc") return CellSpec::av(Basis{Permutation{2, 1}});
    if (tok == "dec") return CellSpec::av(Basis{Permutation{1, 2}});
    if (tok.starts_with("gr=")) {
        const std::string num(tok.substr(3));
        char* end = nullptr;
        const double v = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size())
            throw ParseError("malformed growth rate '" + num + "'", line, column + 3);
        if (!std::isfinite(v) || v < 1.0)
            throw DomainError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                              ": growth rate " + num + " is below 1");
        return CellSpec::rate(v);
    }
    if (tok.starts_with("Av(")) return CellSpec::av(parse_basis(tok, line, column - 1));
    throw ParseError("unknown cell token '" + std::string(tok) + "'", line, column);
}

}  // namespace detail

/// Parses a grid document: one display row per line, top row first,
/// whitespace-separated cell tokens (`.`, `inc`, `dec`, `Av(...)`, `gr=<real>`).
/// `#` starts a comment; blank lines are skipped.
inline GridMatrix parse_grid(std::string_view text) {
    std::vector<std::vector<CellSpec>> rows;
    std::size_t first_row_line = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        pos = eol + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::vector<CellSpec> row;
        std::size_t i = 0;
        while (i < line.size()) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            const std::size_t start = i;
            if (line.substr(i).starts_with("Av(")) {
                const std::size_t close = line.find(')', i);
                if (close == std::string_view::npos)
                    throw ParseError("missing closing parenthesis", line_no, line.size() + 1);
                i = close + 1;
            } else {
                while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            }
            row.push_back(detail::parse_cell_token(line.substr(start, i - start), line_no, start + 1));
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw DimensionError("row has " + std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(rows.front().size()),
                                 line_no, 1);
        if (rows.empty()) first_row_line = line_no;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("grid document has no cells", 0, 0);
    bool any = false;
    for (const auto& r : rows)
        for (const auto& c : r) any = any || !c.is_empty();
    if (!any) throw ParseError("all cells are empty", first_row_line, 1);
    return GridMatrix::from_display_rows(rows);
}

}  // namespace gridgrow
