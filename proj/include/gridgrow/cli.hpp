#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridgrow/bigint.hpp"
#include "gridgrow/counting.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/grid.hpp"
#include "gridgrow/gridding.hpp"
#include "gridgrow/spectral.hpp"
#include "gridgrow/variational.hpp"

namespace gridgrow::cli {

enum class Command { predict, count, verify, optimize, sample };
enum class OutputFormat { json, csv };

/// sysexits-style process status codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 2,
    exit_usage = 64,
    exit_data = 65,
    exit_no_input = 66,
    exit_resource = 69,
    exit_software = 70,
};

struct RunConfig {
    Command command = Command::predict;
    std::string grid_path;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    double tol = 1e-12;
    BruteForceCaps caps;
    std::optional<std::string> catalog_path;
    OutputFormat output = OutputFormat::json;
    unsigned threads = 1;
    /// Random draws for `optimize`.
    std::size_t samples = 100'000;
    /// `verify` accepts the last ratio count_n / count_{n-1} inside
    /// [band_low * gr, band_high * gr].
    double band_low = 0.5;
    double band_high = 1.05;
    /// Upper bound on cell-class members held in memory by `sample`.
    std::size_t list_budget = EnumerateOptions{}.list_budget;
};

/// GRIDGROW_CAP_N, when set to a nonnegative integer, overrides both brute-force caps.
inline void apply_cap_override(RunConfig& config, const char* value) {
    if (value == nullptr || *value == '\0') return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value, &end, 10);
    if (*end != '\0') throw ContractError("GRIDGROW_CAP_N must be a nonnegative integer");
    config.caps.membership = static_cast<std::size_t>(v);
    config.caps.ungridded = static_cast<std::size_t>(v);
}

class UsageError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

namespace detail {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline GrowthRateCatalog load_catalog(const RunConfig& config) {
    auto cat = GrowthRateCatalog::builtin();
    if (config.catalog_path) {
        std::istringstream in(read_file(*config.catalog_path));
        cat.merge(parse_catalog(in));
    }
    return cat;
}

inline std::size_t require_n(const RunConfig& config, const char* command) {
    if (!config.n) throw UsageError(std::string(command) + " requires --n");
    return *config.n;
}

inline Json matrix_json(const RealMatrix& m) {
    Json cols = Json::array();
    for (std::size_t k = 0; k < m.columns(); ++k) {
        Json col = Json::array();
        for (std::size_t l = 0; l < m.rows(); ++l) col.push_back(m(k, l));
        cols.push_back(std::move(col));
    }
    return cols;
}

inline Json matrix_json(const WeightMatrix& m) {
    Json cols = Json::array();
    for (std::size_t k = 0; k < m.columns(); ++k) {
        Json col = Json::array();
        for (std::size_t l = 0; l < m.rows(); ++l) col.push_back(m(k, l));
        cols.push_back(std::move(col));
    }
    return cols;
}

/// 17 significant digits, always with a decimal point or exponent so the value reads back as a float.
inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

/// Compact JSON, like Json::dump() except for the float format.
inline void write_json(std::ostream& out, const Json& v) {
    switch (v.type()) {
        case Json::value_t::object: {
            out << '{';
            bool first = true;
            for (const auto& [k, item] : v.items()) {
                out << (first ? "" : ",") << Json(k).dump() << ':';
                write_json(out, item);
                first = false;
            }
            out << '}';
            break;
        }
        case Json::value_t::array: {
            out << '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) out << ',';
                write_json(out, v[i]);
            }
            out << ']';
            break;
        }
        case Json::value_t::number_float: out << format_double(v.get<double>()); break;
        default: out << v.dump();
    }
}

inline void emit_json(std::ostream& out, const Json& v) {
    write_json(out, v);
    out << '\n';
}

inline std::string csv_scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) s += ';';
            s += csv_scalar(v[i]);
        }
        return s;
    }
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

/// Flat `key,value` lines; nested arrays are joined with ';'.
inline void write_key_value_csv(std::ostream& out, const Json& obj) {
    out << "key,value\n";
    for (const auto& [k, v] : obj.items()) out << k << ',' << csv_scalar(v) << '\n';
}

inline void write_rows_csv(std::ostream& out, const Json& rows, const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto& v = row.at(columns[i]);
            out << (i ? "," : "") << (v.is_null() ? "" : csv_scalar(v));
        }
        out << '\n';
    }
}

inline PowerIterationOptions power_options(const RunConfig& config) {
    PowerIterationOptions o;
    o.tol = config.tol;
    return o;
}

inline int run_predict(const RunConfig& config, const GridMatrix& grid, std::ostream& out) {
    const auto p = predict_growth_rate(grid, load_catalog(config), power_options(config));
    Json j;
    j["gr"] = p.gr;
    j["s"] = p.spectral.s;
    j["r"] = p.spectral.r;
    j["c"] = p.spectral.c;
    j["X"] = matrix_json(p.blueprint);
    if (config.output == OutputFormat::csv)
        write_key_value_csv(out, j);
    else
        emit_json(out, j);
    return exit_ok;
}

inline int run_count(const RunConfig& config, const GridMatrix& grid, std::ostream& out) {
    const std::size_t n_max = require_n(config, "count");
    const CellCountTable table(grid, n_max);
    Json rows = Json::array();
    BigInt previous;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const BigInt gridded = count_gridded_total(grid, n, table, config.threads);
        Json row;
        row["n"] = n;
        row["gridded"] = to_decimal(gridded);
        row["ungridded"] = n <= config.caps.ungridded ? Json(to_decimal(count_ungridded(grid, n, config.caps.ungridded)))
                                                      : Json(nullptr);
        if (config.output == OutputFormat::csv)
            row["ratio"] = n > 0 && previous != 0 ? Json(ratio_as_double(gridded, previous)) : Json(nullptr);
        rows.push_back(std::move(row));
        previous = gridded;
    }
    if (config.output == OutputFormat::csv)
        write_rows_csv(out, rows, {"n", "gridded", "ungridded", "ratio"});
    else
        emit_json(out, rows);
    return exit_ok;
}

inline int run_verify(const RunConfig& config, const GridMatrix& grid, std::ostream& out) {
    const std::size_t n_max = require_n(config, "verify");
    const auto prediction = predict_growth_rate(grid, load_catalog(config), power_options(config));
    const CellCountTable table(grid, n_max);
    const std::size_t dims = grid.columns() + grid.rows();

    Json rows = Json::array();
    bool sandwich_ok = true, oracle_ok = true;
    BigInt previous;
    std::optional<double> last_ratio;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const BigInt gridded = count_gridded_total(grid, n, table, config.threads);
        Json row;
        row["n"] = n;
        row["gridded"] = to_decimal(gridded);
        if (n <= config.caps.ungridded) {
            const BigInt ungridded = count_ungridded(grid, n, config.caps.ungridded);
            const BigInt brute = count_gridded_brute_force(grid, n, config.caps.ungridded);
            BigInt upper;
            mpz_ui_pow_ui(upper.get_mpz_t(), n + 1, dims);
            upper *= ungridded;
            const bool sandwich = ungridded <= gridded && gridded <= upper;
            const bool oracle = brute == gridded;
            sandwich_ok = sandwich_ok && sandwich;
            oracle_ok = oracle_ok && oracle;
            row["ungridded"] = to_decimal(ungridded);
            row["gridded_brute_force"] = to_decimal(brute);
            row["sandwich"] = sandwich;
            row["oracle"] = oracle;
        } else {
            row["ungridded"] = nullptr;
            row["gridded_brute_force"] = nullptr;
            row["sandwich"] = nullptr;
            row["oracle"] = nullptr;
        }
        if (n > 0 && previous != 0) {
            last_ratio = ratio_as_double(gridded, previous);
            row["ratio"] = *last_ratio;
        } else {
            row["ratio"] = nullptr;
        }
        rows.push_back(std::move(row));
        previous = gridded;
    }

    const double lo = config.band_low * prediction.gr, hi = config.band_high * prediction.gr;
    const bool ratio_ok = !last_ratio || (*last_ratio >= lo && *last_ratio <= hi);
    const bool ok = sandwich_ok && oracle_ok && ratio_ok;

    if (config.output == OutputFormat::csv) {
        write_rows_csv(out, rows, {"n", "gridded", "ungridded", "gridded_brute_force", "sandwich", "oracle", "ratio"});
    } else {
        Json j;
        j["gr"] = prediction.gr;
        j["rows"] = std::move(rows);
        j["ratio_last"] = last_ratio ? Json(*last_ratio) : Json(nullptr);
        j["ratio_band"] = Json::array({lo, hi});
        j["sandwich_ok"] = sandwich_ok;
        j["oracle_ok"] = oracle_ok;
        j["ratio_ok"] = ratio_ok;
        j["ok"] = ok;
        emit_json(out, j);
    }
    return ok ? exit_ok : exit_verify_failed;
}

inline int run_optimize(const RunConfig& config, const GridMatrix& grid, std::ostream& out) {
    const auto p = predict_growth_rate(grid, load_catalog(config), power_options(config));
    SearchOptions opts;
    opts.samples = config.samples;
    opts.seed = config.seed.value_or(0);
    opts.threads = config.threads;
    const auto search = simplex_search(p.gamma, opts);
    Json j;
    j["s_squared"] = p.gr;
    j["f_blueprint"] = f_eval(p.gamma, UnitWeightMatrix(p.blueprint));
    j["lagrange_residual"] = lagrange_residual(p.gamma, p.blueprint).residual;
    j["search_best"] = search.f;
    j["search_gap"] = p.gr - search.f;
    if (config.output == OutputFormat::csv)
        write_key_value_csv(out, j);
    else
        emit_json(out, j);
    return exit_ok;
}

inline int run_sample(const RunConfig& config, const GridMatrix& grid, std::ostream& out) {
    const std::size_t n = require_n(config, "sample");
    if (!config.seed) throw UsageError("sample requires --seed");
    const auto best = argmax_weight_matrix(grid, n);
    const CellListTable lists(grid, best.matrix.max_entry(), config.list_budget);
    std::mt19937_64 rng(*config.seed);
    const auto g = sample_gridded(grid, best.matrix, lists, rng);
    Json j;
    j["n"] = n;
    j["seed"] = *config.seed;
    j["weight_matrix"] = matrix_json(best.matrix);
    j["perm"] = std::vector<int>(g.perm.entries().begin(), g.perm.entries().end());
    j["column_divisions"] = g.column_divisions;
    j["row_divisions"] = g.row_divisions;
    j["witness_valid"] = is_valid_gridding(grid, g);
    j["member_brute_force"] = n <= config.caps.membership
                                  ? Json(brute_force_membership(grid, g.perm, config.caps.membership).has_value())
                                  : Json(nullptr);
    if (config.output == OutputFormat::csv)
        write_key_value_csv(out, j);
    else
        emit_json(out, j);
    return exit_ok;
}

}  // namespace detail

/// Executes one command. Reports go to `out`, diagnostics to `err`; the
/// return value is the process exit status.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const GridMatrix grid = parse_grid(detail::read_file(config.grid_path));
        switch (config.command) {
            case Command::predict: return detail::run_predict(config, grid, out);
            case Command::count: return detail::run_count(config, grid, out);
            case Command::verify: return detail::run_verify(config, grid, out);
            case Command::optimize: return detail::run_optimize(config, grid, out);
            case Command::sample: return detail::run_sample(config, grid, out);
        }
        return exit_software;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_no_input;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_data;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << '\n';
        return exit_resource;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_software;
    }
}

}  // namespace gridgrow::cli
