#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gridgrow/cell_matrix.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/grid.hpp"
#include "gridgrow/permutation.hpp"

namespace gridgrow {

// ---------------------------------------------------------------------------
// Growth-rate catalog
// ---------------------------------------------------------------------------

/// Known growth rates of Av(B) classes, keyed by canonical basis text.
class GrowthRateCatalog {
public:
    /// Monotone classes (rate 1) and the six single length-3 patterns (rate 4).
    static GrowthRateCatalog builtin() {
        GrowthRateCatalog c;
        c.set(Basis{Permutation{1, 2}}, 1.0);
        c.set(Basis{Permutation{2, 1}}, 1.0);
        for (const char* p : {"123", "132", "213", "231", "312", "321"}) c.set(Basis{Permutation::from_digits(p)}, 4.0);
        return c;
    }

    void set(const Basis& basis, double gr) {
        if (!std::isfinite(gr) || gr < 0.0) throw DomainError("catalog growth rates must be finite and nonnegative");
        rates_[basis.to_string()] = gr;
    }

    std::optional<double> find(const Basis& basis) const {
        auto it = rates_.find(basis.to_string());
        if (it == rates_.end()) return std::nullopt;
        return it->second;
    }

    /// Entries of `other` override ours.
    void merge(const GrowthRateCatalog& other) {
        for (const auto& [k, v] : other.rates_) rates_[k] = v;
    }

    std::size_t size() const noexcept { return rates_.size(); }

private:
    std::map<std::string, double> rates_;
};

/// Catalog text: one `Av(...) = <real>` per line; `#` comments and blank lines ignored.
inline GrowthRateCatalog parse_catalog(std::istream& in) {
    GrowthRateCatalog cat;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'Av(...) = <real>'", line_no, 1);
        const Basis basis = parse_basis(std::string_view(line).substr(0, eq), line_no, 0);
        const std::string rhs = line.substr(eq + 1);
        std::istringstream num(rhs);
        double gr = 0.0;
        std::string rest;
        if (!(num >> gr) || (num >> rest)) throw ParseError("malformed growth rate", line_no, eq + 2);
        cat.set(basis, gr);
    }
    return cat;
}

inline GrowthRateCatalog parse_catalog(const std::string& text) {
    std::istringstream in(text);
    return parse_catalog(in);
}

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

/// Entrywise square roots of cell growth rates: 0 on empty cells, >= 1 elsewhere.
class GammaMatrix {
public:
    explicit GammaMatrix(RealMatrix values) : values_(std::move(values)) {
        bool any = false;
        for (double v : values_.flat()) {
            if (!(v == 0.0 || v >= 1.0) || !std::isfinite(v))
                throw DomainError("Gamma entries must be 0 or at least 1");
            any = any || v > 0.0;
        }
        if (!any) throw DomainError("Gamma has no positive entry");
    }

    const RealMatrix& values() const noexcept { return values_; }
    operator const RealMatrix&() const noexcept { return values_; }
    double operator()(std::size_t k, std::size_t l) const { return values_(k, l); }
    std::size_t columns() const noexcept { return values_.columns(); }
    std::size_t rows() const noexcept { return values_.rows(); }

private:
    RealMatrix values_;
};

/// Gamma_kl = sqrt(gr(M_kl)). Av cells resolve through the catalog; finite
/// classes and classes missing from the catalog are rejected.
inline GammaMatrix build_gamma(const GridMatrix& grid, const GrowthRateCatalog& catalog) {
    RealMatrix g(grid.columns(), grid.rows(), 0.0);
    std::vector<std::string> unknown;
    for (std::size_t k = 0; k < grid.columns(); ++k) {
        for (std::size_t l = 0; l < grid.rows(); ++l) {
            const auto& c = grid.cell(k, l);
            const std::string where = "(" + std::to_string(k + 1) + "," + std::to_string(l + 1) + ")";
            if (c.is_empty()) continue;
            if (c.is_rate()) {
                g(k, l) = std::sqrt(c.growth_rate());
                continue;
            }
            if (c.basis().avoids_finite_class())
                throw DomainError("cell " + where + " holds the finite class " + c.basis().to_string());
            auto gr = catalog.find(c.basis());
            if (!gr) {
                unknown.push_back(where + " " + c.basis().to_string());
                continue;
            }
            if (*gr < 1.0)
                throw DomainError("catalog rate for " + c.basis().to_string() + " is below 1 for an infinite class");
            g(k, l) = std::sqrt(*gr);
        }
    }
    if (!unknown.empty()) {
        std::string msg = "no growth rate known for cells:";
        for (const auto& u : unknown) msg += " " + u;
        throw DomainError(msg);
    }
    return GammaMatrix(std::move(g));
}

// ---------------------------------------------------------------------------
// Power iteration
// ---------------------------------------------------------------------------

struct PowerIterationOptions {
    /// Bound on the change between successive Rayleigh quotients.
    double tol = 1e-12;
    /// Bound on |A v - lambda v|_inf / max(1, lambda); both bounds must hold to stop.
    double residual_tol = 1e-12;
    std::size_t max_iterations = 1'000'000;
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Dominant eigenpair of a symmetric nonnegative operator given as y = apply(x),
/// starting from `start` (which should be positive on the component of interest).
inline EigenPair power_iteration(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                                 std::vector<double> start, const PowerIterationOptions& opts = {}) {
    auto normalize = [](std::vector<double>& v) {
        double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (nrm > 0.0)
            for (double& x : v) x /= nrm;
        return nrm;
    };
    EigenPair out;
    out.vector = std::move(start);
    if (normalize(out.vector) == 0.0) throw ContractError("power_iteration: zero start vector");

    std::vector<double> y(out.vector.size());
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        apply(out.vector, y);
        const double rq = std::inner_product(out.vector.begin(), out.vector.end(), y.begin(), 0.0);
        double res = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) res = std::max(res, std::abs(y[i] - rq * out.vector[i]));
        res /= std::max(1.0, std::abs(rq));
        out.value = rq;
        out.iterations = it;
        out.residual = res;
        const bool settled = std::abs(rq - previous) < opts.tol && res < opts.residual_tol;
        if (settled || rq == 0.0) return out;
        previous = rq;
        out.vector = y;
        normalize(out.vector);
    }
    throw ConvergenceError("power iteration did not converge", out.residual);
}

/// Dense t x t or u x u Gram products of a Cartesian-indexed matrix.
/// column_gram = Gamma^T Gamma (indexed by rows l), row_gram = Gamma Gamma^T (indexed by columns k).
inline std::vector<double> column_gram(const RealMatrix& g) {
    const std::size_t u = g.rows();
    std::vector<double> m(u * u, 0.0);
    for (std::size_t a = 0; a < u; ++a)
        for (std::size_t b = 0; b < u; ++b)
            for (std::size_t k = 0; k < g.columns(); ++k) m[a * u + b] += g(k, a) * g(k, b);
    return m;
}

inline std::vector<double> row_gram(const RealMatrix& g) {
    const std::size_t t = g.columns();
    std::vector<double> m(t * t, 0.0);
    for (std::size_t a = 0; a < t; ++a)
        for (std::size_t b = 0; b < t; ++b)
            for (std::size_t l = 0; l < g.rows(); ++l) m[a * t + b] += g(a, l) * g(b, l);
    return m;
}

/// Greatest eigenvalue of a dense symmetric nonnegative d x d matrix, uniform start.
inline EigenPair dominant_eigenpair(const std::vector<double>& dense, std::size_t d, const PowerIterationOptions& opts = {}) {
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += dense[i * d + j] * x[j];
            y[i] = s;
        }
    };
    return power_iteration(apply, std::vector<double>(d, 1.0), opts);
}

// ---------------------------------------------------------------------------
// Top singular triple
// ---------------------------------------------------------------------------

/// Greatest singular value s with nonnegative unit singular vectors:
/// Gamma c = s r and Gamma^T r = s c, with r over columns (length t) and
/// c over rows (length u). gr = s^2.
struct SpectralResult {
    double s = 0.0;
    std::vector<double> r;
    std::vector<double> c;
    double gr = 0.0;
    std::size_t iterations = 0;
};

namespace detail {

/// Connected components of the bipartite column/row graph of supp(Gamma).
/// Each component lists its row indices; isolated rows are skipped.
inline std::vector<std::vector<std::size_t>> support_row_components(const RealMatrix& g) {
    const std::size_t t = g.columns(), u = g.rows();
    std::vector<std::size_t> parent(t + u);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t l = 0; l < u; ++l)
            if (g(k, l) > 0.0) parent[find(k)] = find(t + l);

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t l = 0; l < u; ++l) {
        bool touched = false;
        for (std::size_t k = 0; k < t; ++k) touched = touched || g(k, l) > 0.0;
        if (touched) groups[find(t + l)].push_back(l);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, rows] : groups) out.push_back(std::move(rows));
    return out;
}

}  // namespace detail

/// Power iteration on Gamma^T Gamma from a uniform positive start. Each
/// connected block of supp(Gamma) is iterated separately so the returned
/// singular vectors are exactly zero outside the winning block; the block
/// with the largest s wins, earliest block on ties.
inline SpectralResult top_singular_triple(const RealMatrix& gamma, const PowerIterationOptions& opts = {}) {
    const std::size_t t = gamma.columns(), u = gamma.rows();
    for (double v : gamma.flat())
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("top_singular_triple: matrix must be nonnegative");
    const auto gram = column_gram(gamma);
    const auto components = detail::support_row_components(gamma);
    if (components.empty()) throw DomainError("top_singular_triple: matrix has no positive entry");

    SpectralResult best;
    best.s = -1.0;
    std::size_t total_iterations = 0;
    for (const auto& rows : components) {
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < rows.size(); ++j) s += gram[rows[i] * u + rows[j]] * x[j];
                y[i] = s;
            }
        };
        const EigenPair e = power_iteration(apply, std::vector<double>(rows.size(), 1.0), opts);
        total_iterations += e.iterations;
        const double s = std::sqrt(std::max(e.value, 0.0));
        if (s > best.s) {
            best.s = s;
            best.c.assign(u, 0.0);
            for (std::size_t i = 0; i < rows.size(); ++i) best.c[rows[i]] = std::max(e.vector[i], 0.0);
        }
    }
    best.gr = best.s * best.s;
    best.r.assign(t, 0.0);
    for (std::size_t k = 0; k < t; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < u; ++l) acc += gamma(k, l) * best.c[l];
        best.r[k] = acc / best.s;
    }
    best.iterations = total_iterations;
    return best;
}

/// Blueprint X_kl = Gamma_kl r_k c_l / s, which has unit weight.
inline RealMatrix blueprint_x(const RealMatrix& gamma, const SpectralResult& result) {
    if (!(result.s > 0.0)) throw DomainError("blueprint_x: greatest singular value is zero");
    RealMatrix x(gamma.columns(), gamma.rows(), 0.0);
    for (std::size_t k = 0; k < gamma.columns(); ++k)
        for (std::size_t l = 0; l < gamma.rows(); ++l)
            x(k, l) = gamma(k, l) * result.r[k] * result.c[l] / result.s;
    return x;
}

/// Greatest eigenvalue of [[0, Gamma], [Gamma^T, 0]] by power iteration.
/// The block matrix has spectrum symmetric about 0, so iteration runs on
/// the block matrix plus the identity and subtracts the shift afterwards.
inline double bipartite_block_eigenvalue(const RealMatrix& gamma, const PowerIterationOptions& opts = {}) {
    const std::size_t t = gamma.columns(), u = gamma.rows();
    constexpr double shift = 1.0;
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        // x = (column part of length t, row part of length u)
        for (std::size_t k = 0; k < t; ++k) {
            double s = shift * x[k];
            for (std::size_t l = 0; l < u; ++l) s += gamma(k, l) * x[t + l];
            y[k] = s;
        }
        for (std::size_t l = 0; l < u; ++l) {
            double s = shift * x[t + l];
            for (std::size_t k = 0; k < t; ++k) s += gamma(k, l) * x[k];
            y[t + l] = s;
        }
    };
    const EigenPair e = power_iteration(apply, std::vector<double>(t + u, 1.0), opts);
    return e.value - shift;
}

struct Prediction {
    double gr = 0.0;
    SpectralResult spectral;
    RealMatrix blueprint;
    GammaMatrix gamma;
};

/// Growth rate of Grid(M): the greatest eigenvalue of Gamma^T Gamma.
inline Prediction predict_growth_rate(const GridMatrix& grid, const GrowthRateCatalog& catalog,
                                      const PowerIterationOptions& opts = {}) {
    GammaMatrix gamma = build_gamma(grid, catalog);
    SpectralResult sr = top_singular_triple(gamma, opts);
    RealMatrix x = blueprint_x(gamma, sr);
    const double gr = sr.gr;
    return Prediction{gr, std::move(sr), std::move(x), std::move(gamma)};
}

}  // namespace gridgrow
