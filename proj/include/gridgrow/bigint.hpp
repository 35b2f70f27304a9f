#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "gridgrow/errors.hpp"

namespace gridgrow {

using BigInt = mpz_class;

inline std::string to_decimal(const BigInt& v) { return v.get_str(10); }

/// Exact quotient a / b as a double; b must be nonzero.
inline double ratio_as_double(const BigInt& a, const BigInt& b) {
    if (b == 0) throw ContractError("ratio_as_double: zero denominator");
    return mpq_class(a, b).get_d();
}

/// Memoized n! table. Growing it mutates the table, so call `reserve`
/// before sharing one across threads and only read afterwards.
class FactorialTable {
public:
    FactorialTable() : table_{BigInt(1)} {}

    void reserve(std::size_t n) {
        while (table_.size() <= n) {
            BigInt next = table_.back() * static_cast<unsigned long>(table_.size());
            table_.push_back(std::move(next));
        }
    }

    std::size_t limit() const noexcept { return table_.size() - 1; }

    const BigInt& operator()(std::size_t n) {
        reserve(n);
        return table_[n];
    }

    const BigInt& at(std::size_t n) const {
        if (n >= table_.size()) throw ContractError("FactorialTable: entry not reserved");
        return table_[n];
    }

    /// (sum parts)! / prod(parts!). An empty list gives 1.
    BigInt multinomial(std::span<const std::size_t> parts) const {
        std::size_t total = 0;
        for (auto p : parts) total += p;
        BigInt result = at(total);
        for (auto p : parts)
            if (p > 1) mpz_divexact(result.get_mpz_t(), result.get_mpz_t(), at(p).get_mpz_t());
        return result;
    }

private:
    std::vector<BigInt> table_;
};

/// Binomial coefficient C(n, k), exact.
inline BigInt binomial(std::size_t n, std::size_t k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

}  // namespace gridgrow
