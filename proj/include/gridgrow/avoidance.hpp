#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gridgrow/bigint.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/permutation.hpp"

namespace gridgrow {

/// Exact class sizes |C_m| for m = 0..N. counts[0] is always 1.
struct CountSequence {
    std::vector<BigInt> counts;

    std::size_t max_length() const noexcept { return counts.empty() ? 0 : counts.size() - 1; }
    const BigInt& operator[](std::size_t m) const { return counts.at(m); }
    friend bool operator==(const CountSequence&, const CountSequence&) = default;
};

struct EnumerateOptions {
    bool keep_lists = false;
    /// Maximum number of permutations stored across all lengths when
    /// `keep_lists` is set.
    std::size_t list_budget = 4'000'000;
};

struct AvoidanceTable {
    CountSequence counts;
    /// lists[m] holds the avoiders of length m in generation order; empty
    /// unless lists were requested.
    std::vector<std::vector<Permutation>> lists;
};

namespace detail {

class AvoiderSearch {
public:
    AvoiderSearch(const Basis& basis, std::size_t max_length, const EnumerateOptions& opts)
        : basis_(basis), max_length_(max_length), opts_(opts) {
        table_.counts.counts.assign(max_length + 1, BigInt(0));
        if (opts.keep_lists) table_.lists.resize(max_length + 1);
    }

    AvoidanceTable run() {
        current_.reserve(max_length_);
        visit();
        return std::move(table_);
    }

private:
    bool current_avoids() const {
        for (const auto& b : basis_.patterns())
            if (contains_sequence(b.entries(), current_)) return false;
        return true;
    }

    // Every avoider of length m+1 arises exactly once by inserting m+1
    // into a gap of its parent (the avoider with m+1 removed).
    void visit() {
        const std::size_t m = current_.size();
        table_.counts.counts[m] += 1;
        if (opts_.keep_lists) {
            if (++stored_ > opts_.list_budget)
                throw ResourceError("enumerate_av: permutation list budget exceeded");
            table_.lists[m].push_back(Permutation(current_));
        }
        if (m == max_length_) return;
        const int top = static_cast<int>(m + 1);
        for (std::size_t gap = 0; gap <= m; ++gap) {
            current_.insert(current_.begin() + static_cast<std::ptrdiff_t>(gap), top);
            if (current_avoids()) visit();
            current_.erase(current_.begin() + static_cast<std::ptrdiff_t>(gap));
        }
    }

    const Basis& basis_;
    std::size_t max_length_;
    EnumerateOptions opts_;
    AvoidanceTable table_;
    std::vector<int> current_;
    std::size_t stored_ = 0;
};

}  // namespace detail

/// Counts (and optionally lists) the permutations of each length 0..max_length
/// that avoid every pattern of the basis.
inline AvoidanceTable enumerate_av(const Basis& basis, std::size_t max_length, const EnumerateOptions& opts = {}) {
    return detail::AvoiderSearch(basis, max_length, opts).run();
}

inline CountSequence count_av(const Basis& basis, std::size_t max_length) {
    return enumerate_av(basis, max_length).counts;
}

}  // namespace gridgrow
