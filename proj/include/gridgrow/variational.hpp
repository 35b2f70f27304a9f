#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "gridgrow/cell_matrix.hpp"
#include "gridgrow/errors.hpp"

namespace gridgrow {

/// Nonnegative matrix of unit weight (a point of the admissible domain once
/// paired with a Gamma whose support contains its own).
class UnitWeightMatrix {
public:
    static constexpr double weight_tolerance = 1e-12;

    explicit UnitWeightMatrix(RealMatrix values) : values_(std::move(values)) {
        double w = 0.0;
        for (double v : values_.flat()) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("unit-weight matrix entries must be nonnegative");
            w += v;
        }
        if (std::abs(w - 1.0) > weight_tolerance) throw DomainError("matrix does not have unit weight");
    }

    const RealMatrix& values() const noexcept { return values_; }
    operator const RealMatrix&() const noexcept { return values_; }
    double operator()(std::size_t k, std::size_t l) const { return values_(k, l); }

    std::vector<CellIndex> support() const {
        std::vector<CellIndex> s;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_.flat()[i] > 0.0) s.push_back(values_.index_of(i));
        return s;
    }

private:
    RealMatrix values_;
};

namespace detail {

inline void require_same_shape(const RealMatrix& gamma, const RealMatrix& x) {
    if (gamma.columns() != x.columns() || gamma.rows() != x.rows())
        throw ContractError("Gamma and X have different shapes");
}

inline void require_admissible(const RealMatrix& gamma, const RealMatrix& x) {
    require_same_shape(gamma, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.flat()[i] < 0.0) throw DomainError("X has a negative entry");
        if (x.flat()[i] > 0.0 && !(gamma.flat()[i] > 0.0)) throw DomainError("X puts weight on a cell where Gamma is 0");
    }
}

/// log f without admissibility checks; zero cells contribute 0.
inline double log_f_unchecked(const RealMatrix& gamma, const RealMatrix& x) {
    const std::size_t t = x.columns(), u = x.rows();
    double col[16], row[16];
    std::vector<double> col_big, row_big;
    double* cs = col;
    double* rs = row;
    if (t > 16 || u > 16) {
        col_big.assign(t, 0.0);
        row_big.assign(u, 0.0);
        cs = col_big.data();
        rs = row_big.data();
    }
    std::fill(cs, cs + t, 0.0);
    std::fill(rs, rs + u, 0.0);
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t l = 0; l < u; ++l) {
            cs[k] += x(k, l);
            rs[l] += x(k, l);
        }
    double acc = 0.0;
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t l = 0; l < u; ++l) {
            const double v = x(k, l);
            if (v > 0.0) acc += v * (2.0 * std::log(gamma(k, l)) + std::log(cs[k]) + std::log(rs[l]) - 2.0 * std::log(v));
        }
    return acc;
}

/// Flat position of the single positive entry, if there is exactly one.
inline std::optional<std::size_t> single_cell(const RealMatrix& x) {
    std::optional<std::size_t> pos;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.flat()[i] > 0.0) {
            if (pos) return std::nullopt;
            pos = i;
        }
    }
    return pos;
}

}  // namespace detail

/// log of the product form prod (Gamma^2 colsum rowsum / X^2)^X over cells
/// with X > 0. Defined for any nonnegative admissible X, not only unit weight.
inline double log_product_form(const RealMatrix& gamma, const RealMatrix& x) {
    detail::require_admissible(gamma, x);
    return detail::log_f_unchecked(gamma, x);
}

/// f(X) on the admissible domain. A single-cell X evaluates to Gamma_kl^2 exactly.
inline double f_eval(const RealMatrix& gamma, const UnitWeightMatrix& x) {
    detail::require_admissible(gamma, x.values());
    if (auto only = detail::single_cell(x.values())) {
        const double g = gamma.flat()[*only];
        return g * g;
    }
    return std::exp(detail::log_f_unchecked(gamma, x.values()));
}

/// Partials of log f over supp(X), in flat order.
struct Gradient {
    std::vector<CellIndex> cells;
    std::vector<double> partials;
};

/// d log f / dX_kl = 2 log Gamma_kl + (log colsum_k - log X_kl) + (log rowsum_l - log X_kl).
/// Throws BoundaryError at X_kl = 0, where the partial diverges.
inline double partial_log_f(const RealMatrix& gamma, const RealMatrix& x, std::size_t k, std::size_t l) {
    detail::require_admissible(gamma, x);
    const double v = x(k, l);
    if (!(v > 0.0)) throw BoundaryError("partial of log f requested at a zero entry");
    return 2.0 * std::log(gamma(k, l)) + (std::log(column_sum(x, k)) - std::log(v)) +
           (std::log(row_sum(x, l)) - std::log(v));
}

inline Gradient grad_log_f(const RealMatrix& gamma, const RealMatrix& x) {
    detail::require_admissible(gamma, x);
    Gradient g;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x.flat()[i] > 0.0)) continue;
        const auto idx = x.index_of(i);
        g.cells.push_back(idx);
        g.partials.push_back(partial_log_f(gamma, x, idx.column, idx.row));
    }
    return g;
}

struct LagrangeCheck {
    /// (max ratio - min ratio) / mean ratio over supp(X); 0 when the conditions hold.
    double residual = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    /// X is concentrated on one cell; the conditions are vacuous there.
    bool single_cell = false;
};

/// Spread of Gamma_kl sqrt(colsum_k) sqrt(rowsum_l) / X_kl across supp(X).
inline LagrangeCheck lagrange_residual(const RealMatrix& gamma, const RealMatrix& x) {
    detail::require_admissible(gamma, x);
    LagrangeCheck out;
    if (auto only = detail::single_cell(x)) {
        out.single_cell = true;
        out.min_ratio = out.max_ratio = gamma.flat()[*only];
        return out;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < x.columns(); ++k) {
        const double cs = column_sum(x, k);
        for (std::size_t l = 0; l < x.rows(); ++l) {
            const double v = x(k, l);
            if (!(v > 0.0)) continue;
            const double rho = gamma(k, l) * std::sqrt(cs) * std::sqrt(row_sum(x, l)) / v;
            lo = std::min(lo, rho);
            hi = std::max(hi, rho);
            sum += rho;
            ++count;
        }
    }
    if (count == 0) throw DomainError("lagrange_residual: X has empty support");
    out.min_ratio = lo;
    out.max_ratio = hi;
    out.residual = (hi - lo) / (sum / static_cast<double>(count));
    return out;
}

/// Compares the analytic pair derivatives (g_a - g_b) against centered
/// differences of log f along e_a - e_b for every pair of support cells.
/// Returns the worst |numeric - analytic| / max(1, |analytic|).
inline double finite_diff_check(const RealMatrix& gamma, const RealMatrix& x, double h = 1e-6) {
    const Gradient g = grad_log_f(gamma, x);
    const std::size_t m = g.cells.size();
    if (m < 2) return 0.0;
    for (const auto& c : g.cells) {
        const double v = x[c];
        if (v - h <= 0.0 || v + h >= 1.0) throw BoundaryError("finite-difference step leaves (0,1)");
    }
    double worst = 0.0;
    RealMatrix probe = x;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const auto ca = g.cells[a], cb = g.cells[b];
            probe[ca] = x[ca] + h;
            probe[cb] = x[cb] - h;
            const double up = detail::log_f_unchecked(gamma, probe);
            probe[ca] = x[ca] - h;
            probe[cb] = x[cb] + h;
            const double down = detail::log_f_unchecked(gamma, probe);
            probe[ca] = x[ca];
            probe[cb] = x[cb];
            const double numeric = (up - down) / (2.0 * h);
            const double analytic = g.partials[a] - g.partials[b];
            worst = std::max(worst, std::abs(numeric - analytic) / std::max(1.0, std::abs(analytic)));
        }
    }
    return worst;
}

struct SearchOptions {
    std::size_t samples = 100'000;
    std::uint64_t seed = 0;
    double concentration = 1.0;
    double shrink = 0.5;
    std::size_t climb_rounds = 60;
    double initial_step = 0.25;
    /// Best draws used as hill-climbing starts.
    std::size_t starts = 4;
    std::size_t max_sweeps_per_round = 200;
    unsigned threads = 1;
};

struct SearchResult {
    RealMatrix x;
    double f = 0.0;
    double log_f = 0.0;
};

namespace detail {

struct Candidate {
    double log_f;
    std::size_t draw;
    std::vector<double> point;  // weights over the support, in support order
};

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.log_f != b.log_f) return a.log_f > b.log_f;
    return a.draw < b.draw;
}

inline constexpr std::size_t search_chunk = 4096;

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Coordinate-pair hill climbing on log f. With C and R the column and row
/// sums, log f = sum X (2 log Gamma - 2 log X) + sum C log C + sum R log R,
/// so moving mass between two cells touches O(1) terms.
class PairClimber {
public:
    PairClimber(const RealMatrix& gamma, const std::vector<std::size_t>& support, std::vector<double> point)
        : p_(std::move(point)), col_sum_(gamma.columns(), 0.0), row_sum_(gamma.rows(), 0.0) {
        for (std::size_t i = 0; i < support.size(); ++i) {
            const auto idx = gamma.index_of(support[i]);
            col_.push_back(idx.column);
            row_.push_back(idx.row);
            log_gamma_.push_back(std::log(gamma.flat()[support[i]]));
            col_sum_[idx.column] += p_[i];
            row_sum_[idx.row] += p_[i];
        }
    }

    /// One pass over all ordered pairs (a gains, b loses); true if anything improved.
    bool sweep(double step) {
        const std::size_t m = p_.size();
        bool improved = false;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                const double delta = std::min(step, p_[b]);
                if (!(delta > 0.0)) continue;
                if (gain(a, b, delta) > 0.0) {
                    move(a, b, delta);
                    improved = true;
                }
            }
        }
        return improved;
    }

    const std::vector<double>& point() const noexcept { return p_; }

private:
    double gain(std::size_t a, std::size_t b, double delta) const {
        const double xa = p_[a], xb = p_[b];
        const double xb_new = std::max(xb - delta, 0.0);
        double g = 2.0 * delta * (log_gamma_[a] - log_gamma_[b]);
        g -= 2.0 * (xlogx(xa + delta) - xlogx(xa) + xlogx(xb_new) - xlogx(xb));
        if (col_[a] != col_[b]) {
            const double ca = col_sum_[col_[a]], cb = col_sum_[col_[b]];
            g += xlogx(ca + delta) - xlogx(ca) + xlogx(std::max(cb - delta, 0.0)) - xlogx(cb);
        }
        if (row_[a] != row_[b]) {
            const double ra = row_sum_[row_[a]], rb = row_sum_[row_[b]];
            g += xlogx(ra + delta) - xlogx(ra) + xlogx(std::max(rb - delta, 0.0)) - xlogx(rb);
        }
        return g;
    }

    void move(std::size_t a, std::size_t b, double delta) {
        p_[a] += delta;
        p_[b] = std::max(p_[b] - delta, 0.0);
        col_sum_[col_[a]] += delta;
        col_sum_[col_[b]] = std::max(col_sum_[col_[b]] - delta, 0.0);
        row_sum_[row_[a]] += delta;
        row_sum_[row_[b]] = std::max(row_sum_[row_[b]] - delta, 0.0);
    }

    std::vector<double> p_;
    std::vector<double> col_sum_, row_sum_;
    std::vector<std::size_t> col_, row_;
    std::vector<double> log_gamma_;
};

}  // namespace detail

/// Random-restart maximizer of f over unit-weight matrices supported on
/// supp(Gamma): symmetric Dirichlet draws, then pairwise mass-transfer hill
/// climbing from the best draws with a geometrically shrinking step.
/// Draws are split into fixed chunks with their own RNG streams, so the
/// result does not depend on the thread count.
inline SearchResult simplex_search(const RealMatrix& gamma, const SearchOptions& opts = {}) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < gamma.size(); ++i)
        if (gamma.flat()[i] > 0.0) support.push_back(i);
    if (support.empty()) throw DomainError("simplex_search: Gamma has no positive entry");
    const std::size_t m = support.size();

    RealMatrix scratch(gamma.columns(), gamma.rows(), 0.0);
    auto evaluate = [&support](const RealMatrix& g, RealMatrix& buf, const std::vector<double>& p) {
        for (std::size_t i = 0; i < p.size(); ++i) buf.flat()[support[i]] = p[i];
        return detail::log_f_unchecked(g, buf);
    };

    if (m == 1) {
        SearchResult r{RealMatrix(gamma.columns(), gamma.rows(), 0.0), 0.0, 0.0};
        r.x.flat()[support[0]] = 1.0;
        const double g = gamma.flat()[support[0]];
        r.f = g * g;
        r.log_f = std::log(r.f);
        return r;
    }

    const std::size_t samples = std::max<std::size_t>(opts.samples, 1);
    const std::size_t chunks = (samples + detail::search_chunk - 1) / detail::search_chunk;
    const std::size_t keep = std::max<std::size_t>(opts.starts, 1);
    std::vector<std::vector<detail::Candidate>> chunk_best(chunks);

    auto run_chunk = [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        std::gamma_distribution<double> gam(opts.concentration, 1.0);
        RealMatrix buf(gamma.columns(), gamma.rows(), 0.0);
        std::vector<double> p(m);
        auto& best = chunk_best[c];
        const std::size_t begin = c * detail::search_chunk;
        const std::size_t end = std::min(samples, begin + detail::search_chunk);
        for (std::size_t d = begin; d < end; ++d) {
            double total = 0.0;
            for (auto& v : p) total += (v = gam(rng));
            if (!(total > 0.0)) continue;
            for (auto& v : p) v /= total;
            detail::Candidate cand{evaluate(gamma, buf, p), d, p};
            if (best.size() < keep || detail::better(cand, best.back())) {
                best.push_back(std::move(cand));
                std::sort(best.begin(), best.end(), detail::better);
                if (best.size() > keep) best.pop_back();
            }
        }
    };

    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back([&, w] {
                for (std::size_t c = w; c < chunks; c += threads) run_chunk(c);
            });
    }

    std::vector<detail::Candidate> starts;
    for (auto& cb : chunk_best)
        for (auto& cand : cb) starts.push_back(std::move(cand));
    std::sort(starts.begin(), starts.end(), detail::better);
    if (starts.size() > keep) starts.resize(keep);

    // Uniform point as a fallback start (every Dirichlet draw could underflow in theory).
    if (starts.empty()) starts.push_back({evaluate(gamma, scratch, std::vector<double>(m, 1.0 / m)), 0,
                                          std::vector<double>(m, 1.0 / m)});

    detail::Candidate best = starts.front();
    for (const auto& start : starts) {
        detail::PairClimber climber(gamma, support, start.point);
        double step = opts.initial_step;
        for (std::size_t round = 0; round < opts.climb_rounds; ++round) {
            for (std::size_t sweep = 0; sweep < opts.max_sweeps_per_round; ++sweep)
                if (!climber.sweep(step)) break;
            step *= opts.shrink;
        }
        std::vector<double> p = climber.point();
        double total = 0.0;
        for (double v : p) total += v;
        for (double& v : p) v /= total;
        detail::Candidate done{evaluate(gamma, scratch, p), start.draw, std::move(p)};
        if (detail::better(done, best)) best = std::move(done);
    }

    SearchResult r{RealMatrix(gamma.columns(), gamma.rows(), 0.0), 0.0, best.log_f};
    for (std::size_t i = 0; i < m; ++i) r.x.flat()[support[i]] = best.point[i];
    if (auto only = detail::single_cell(r.x)) {
        const double g = gamma.flat()[*only];
        r.f = g * g;
    } else {
        r.f = std::exp(best.log_f);
    }
    return r;
}

}  // namespace gridgrow
