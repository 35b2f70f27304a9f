#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridgrow/errors.hpp"

namespace gridgrow {

/// Distinct-value contract violation in order-isomorphism checks.
class RepeatedValueError : public ContractError {
public:
    using ContractError::ContractError;
};

namespace detail {

template <typename T>
void require_distinct(std::span<const T> a, const char* which) {
    std::vector<T> sorted(a.begin(), a.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw RepeatedValueError(std::string("order_isomorphic: repeated value in ") + which);
}

template <typename T>
std::vector<std::size_t> argsort(std::span<const T> a) {
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
    return idx;
}

}  // namespace detail

/// True iff a and b have the same length and the same pairwise comparisons.
/// Both sequences must consist of distinct values.
template <typename T, typename U>
bool order_isomorphic(std::span<const T> a, std::span<const U> b) {
    detail::require_distinct(a, "first sequence");
    detail::require_distinct(b, "second sequence");
    if (a.size() != b.size()) return false;
    return detail::argsort(a) == detail::argsort(b);
}

template <typename T, typename U>
bool order_isomorphic(const std::vector<T>& a, const std::vector<U>& b) {
    return order_isomorphic(std::span<const T>(a), std::span<const U>(b));
}

/// A permutation of {1..n} in one-line notation. Length 0 is the empty permutation.
class Permutation {
public:
    using value_type = int;

    Permutation() = default;

    explicit Permutation(std::vector<int> entries) : entries_(std::move(entries)) {
        const auto n = entries_.size();
        std::vector<bool> seen(n + 1, false);
        for (int v : entries_) {
            if (v < 1 || static_cast<std::size_t>(v) > n || seen[v])
                throw ContractError("Permutation: entries are not a bijection of 1..n");
            seen[v] = true;
        }
    }

    Permutation(std::initializer_list<int> entries) : Permutation(std::vector<int>(entries)) {}

    /// Digit string such as "41523"; only lengths up to 9 are expressible.
    static Permutation from_digits(std::string_view digits) {
        std::vector<int> e;
        e.reserve(digits.size());
        for (char ch : digits) {
            if (ch < '1' || ch > '9') throw ContractError("Permutation: expected digits 1-9");
            e.push_back(ch - '0');
        }
        return Permutation(std::move(e));
    }

    /// The permutation order isomorphic to a sequence of distinct values.
    template <typename T>
    static Permutation standardize(std::span<const T> values) {
        detail::require_distinct(values, "sequence");
        auto order = detail::argsort(values);
        std::vector<int> e(values.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank) e[order[rank]] = static_cast<int>(rank + 1);
        Permutation p;
        p.entries_ = std::move(e);
        return p;
    }

    static Permutation identity(std::size_t n) {
        std::vector<int> e(n);
        std::iota(e.begin(), e.end(), 1);
        Permutation p;
        p.entries_ = std::move(e);
        return p;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    std::span<const int> entries() const noexcept { return entries_; }

    bool is_increasing() const { return std::is_sorted(entries_.begin(), entries_.end()); }
    bool is_decreasing() const { return std::is_sorted(entries_.rbegin(), entries_.rend()); }

    /// Digits when every entry is below 10, otherwise comma-separated.
    std::string to_string() const {
        std::string s;
        const bool digits = entries_.size() <= 9;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (!digits && i > 0) s += ',';
            s += std::to_string(entries_[i]);
        }
        return s;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation& a, const Permutation& b) {
        if (a.size() != b.size()) return a.size() <=> b.size();
        return a.entries_ <=> b.entries_;
    }

private:
    std::vector<int> entries_;
};

namespace detail {

/// Backtracking subsequence search. Pattern entries are matched in index
/// order; each candidate host value must fall strictly between the host
/// values already matched to the pattern's nearest smaller and nearest
/// larger earlier entries. Host values must be distinct.
inline bool contains_sequence(std::span<const int> pattern, std::span<const int> host) {
    const std::size_t k = pattern.size();
    const std::size_t n = host.size();
    if (k == 0) return true;
    if (k > n) return false;

    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> below(k, none), above(k, none);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (pattern[i] < pattern[j] && (below[j] == none || pattern[i] > pattern[below[j]])) below[j] = i;
            if (pattern[i] > pattern[j] && (above[j] == none || pattern[i] < pattern[above[j]])) above[j] = i;
        }
    }

    std::vector<std::size_t> pos(k, 0);
    std::size_t j = 0;
    std::size_t next = 0;  // first host index to try for pattern entry j
    while (true) {
        bool placed = false;
        for (std::size_t p = next; p + (k - j) <= n; ++p) {
            const int v = host[p];
            if (below[j] != none && v < host[pos[below[j]]]) continue;
            if (above[j] != none && v > host[pos[above[j]]]) continue;
            pos[j] = p;
            placed = true;
            break;
        }
        if (placed) {
            if (j + 1 == k) return true;
            next = pos[j] + 1;
            ++j;
        } else {
            if (j == 0) return false;
            --j;
            next = pos[j] + 1;
        }
    }
}

}  // namespace detail

/// True iff some subsequence of host is order isomorphic to pattern.
inline bool contains(const Permutation& pattern, const Permutation& host) {
    return detail::contains_sequence(pattern.entries(), host.entries());
}

/// A finite set of avoided patterns, kept minimal under containment and sorted.
class Basis {
public:
    Basis() = default;

    explicit Basis(std::vector<Permutation> patterns) {
        for (const auto& p : patterns)
            if (p.empty()) throw ContractError("Basis: patterns must have length at least 1");
        std::sort(patterns.begin(), patterns.end());
        patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
        // Sorted by length, so any pattern contained in p precedes it.
        for (const auto& p : patterns) {
            bool minimal = std::none_of(patterns_.begin(), patterns_.end(),
                                        [&](const Permutation& q) { return contains(q, p); });
            if (minimal) patterns_.push_back(p);
        }
    }

    Basis(std::initializer_list<Permutation> patterns) : Basis(std::vector<Permutation>(patterns)) {}

    const std::vector<Permutation>& patterns() const noexcept { return patterns_; }
    bool empty() const noexcept { return patterns_.empty(); }
    std::size_t size() const noexcept { return patterns_.size(); }

    /// Av(B) is finite iff B holds both an increasing and a decreasing
    /// pattern (Erdos-Szekeres).
    bool avoids_finite_class() const {
        bool inc = false, dec = false;
        for (const auto& p : patterns_) {
            inc = inc || p.is_increasing();
            dec = dec || p.is_decreasing();
        }
        return inc && dec;
    }

    /// Canonical text, e.g. "Av(2143,3412)".
    std::string to_string() const {
        std::string s = "Av(";
        for (std::size_t i = 0; i < patterns_.size(); ++i) {
            if (i > 0) s += ',';
            s += patterns_[i].to_string();
        }
        return s + ")";
    }

    friend bool operator==(const Basis&, const Basis&) = default;

private:
    std::vector<Permutation> patterns_;
};

/// True iff host contains no pattern of the basis.
inline bool avoids_all(const Basis& basis, const Permutation& host) {
    for (const auto& b : basis.patterns())
        if (contains(b, host)) return false;
    return true;
}

/// Parses `Av(231)` or `Av(2143, 3412)`. Whitespace is ignored. Errors
/// report line `line` and 1-based columns offset by `column_offset`.
inline Basis parse_basis(std::string_view text, std::size_t line = 1, std::size_t column_offset = 0) {
    struct Char {
        char ch;
        std::size_t column;
    };
    std::vector<Char> chars;
    for (std::size_t i = 0; i < text.size(); ++i)
        if (!std::isspace(static_cast<unsigned char>(text[i]))) chars.push_back({text[i], column_offset + i + 1});

    auto fail = [&](const std::string& what, std::size_t col) -> ParseError { return ParseError(what, line, col); };
    const std::size_t end_col = column_offset + text.size() + 1;

    if (chars.size() < 4 || chars[0].ch != 'A' || chars[1].ch != 'v' || chars[2].ch != '(')
        throw fail("expected Av(...)", chars.empty() ? column_offset + 1 : chars[0].column);
    if (chars.back().ch != ')') throw fail("missing closing parenthesis", end_col);

    std::vector<Permutation> patterns;
    std::string digits;
    std::size_t start_col = chars[3].column;
    for (std::size_t i = 3; i + 1 < chars.size() + 1; ++i) {
        const bool closing = i + 1 == chars.size();
        const char ch = chars[i].ch;
        if (ch == ',' || closing) {
            if (digits.empty()) {
                if (closing && patterns.empty() && i == 3) break;  // Av()
                throw fail("empty pattern", chars[i].column);
            }
            try {
                patterns.push_back(Permutation::from_digits(digits));
            } catch (const ContractError&) {
                throw fail("pattern '" + digits + "' is not a permutation", start_col);
            }
            digits.clear();
            if (closing) break;
            start_col = i + 1 < chars.size() ? chars[i + 1].column : end_col;
        } else if (ch >= '1' && ch <= '9') {
            if (digits.size() == 9) throw fail("pattern longer than 9", chars[i].column);
            digits += ch;
        } else {
            throw fail(std::string("unexpected character '") + ch + "'", chars[i].column);
        }
    }
    return Basis(std::move(patterns));
}

}  // namespace gridgrow
