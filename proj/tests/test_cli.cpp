#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gridgrow/cli.hpp"

using namespace gridgrow;
using namespace gridgrow::cli;
using nlohmann::json;

namespace {

std::string grid_path(const char* name) { return std::string(GRIDGROW_SOURCE_DIR) + "/grids/" + name; }

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome run_config(const RunConfig& config) {
    std::ostringstream out, err;
    const int status = run(config, out, err);
    return {status, out.str(), err.str()};
}

RunConfig config_for(Command c, const char* grid, std::optional<std::size_t> n = std::nullopt) {
    RunConfig cfg;
    cfg.command = c;
    cfg.grid_path = grid_path(grid);
    cfg.n = n;
    return cfg;
}

}  // namespace

TEST(CliPredict, SkewMerged) {
    const auto r = run_config(config_for(Command::predict, "skew_merged.grid"));
    ASSERT_EQ(r.status, exit_ok) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["gr"].get<double>(), 4.0, 1e-12);
    EXPECT_NEAR(j["s"].get<double>(), 2.0, 1e-12);
    ASSERT_EQ(j["X"].size(), 2u);
    for (const auto& col : j["X"])
        for (const auto& v : col) EXPECT_NEAR(v.get<double>(), 0.25, 1e-12);
}

TEST(CliPredict, CatalogAndRates) {
    auto cfg = config_for(Command::predict, "direct_rate.grid");
    const auto r = run_config(cfg);
    ASSERT_EQ(r.status, exit_ok) << r.err;
    EXPECT_NEAR(json::parse(r.out)["gr"].get<double>(), 3.25, 1e-12);
}

TEST(CliCount, Juxtaposition) {
    const auto r = run_config(config_for(Command::count, "juxt.grid", 12));
    ASSERT_EQ(r.status, exit_ok) << r.err;
    const auto rows = json::parse(r.out);
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_EQ(rows[12]["gridded"], "4096");
    EXPECT_TRUE(rows[12]["ungridded"].is_null());
    EXPECT_EQ(rows[3]["ungridded"], "5");
}

TEST(CliCount, Csv) {
    auto cfg = config_for(Command::count, "juxt.grid", 3);
    cfg.output = OutputFormat::csv;
    const auto r = run_config(cfg);
    ASSERT_EQ(r.status, exit_ok) << r.err;
    EXPECT_EQ(r.out, "n,gridded,ungridded,ratio\n0,1,1,\n1,2,1,2.0\n2,4,2,2.0\n3,8,5,2.0\n");
}

TEST(CliVerify, SkewMergedPasses) {
    const auto r = run_config(config_for(Command::verify, "skew_merged.grid", 7));
    ASSERT_EQ(r.status, exit_ok) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["ok"].get<bool>());
    EXPECT_TRUE(j["oracle_ok"].get<bool>());
    EXPECT_TRUE(j["sandwich_ok"].get<bool>());
    EXPECT_EQ(j["rows"][7]["gridded"], "7616");
}

TEST(CliVerify, NarrowBandFails) {
    auto cfg = config_for(Command::verify, "juxt.grid", 5);
    cfg.band_low = 1.5;
    cfg.band_high = 2.0;
    const auto r = run_config(cfg);
    EXPECT_EQ(r.status, exit_verify_failed);
    const auto j = json::parse(r.out);
    EXPECT_FALSE(j["ratio_ok"].get<bool>());
    EXPECT_FALSE(j["ok"].get<bool>());
}

TEST(CliOptimize, Fig1Right) {
    auto cfg = config_for(Command::optimize, "fig1_right.grid");
    cfg.samples = 5000;
    const auto r = run_config(cfg);
    ASSERT_EQ(r.status, exit_ok) << r.err;
    const auto j = json::parse(r.out);
    const double s2 = j["s_squared"].get<double>();
    EXPECT_NEAR(j["f_blueprint"].get<double>(), s2, 1e-9 * s2);
    EXPECT_LE(j["lagrange_residual"].get<double>(), 1e-8);
    EXPECT_LE(j["search_gap"].get<double>(), 1e-3);
    EXPECT_GE(j["search_gap"].get<double>(), -1e-6);
}

TEST(CliSample, ValidAndDeterministic) {
    auto cfg = config_for(Command::sample, "fig1_right.grid", 9);
    cfg.seed = 123;
    const auto a = run_config(cfg);
    const auto b = run_config(cfg);
    ASSERT_EQ(a.status, exit_ok) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = json::parse(a.out);
    GriddedPermutation g{Permutation(j["perm"].get<std::vector<int>>()),
                         j["column_divisions"].get<std::vector<std::size_t>>(),
                         j["row_divisions"].get<std::vector<std::size_t>>()};
    EXPECT_EQ(g.perm.size(), 9u);
    EXPECT_TRUE(j["witness_valid"].get<bool>());
    EXPECT_TRUE(j["member_brute_force"].get<bool>());
    cfg.caps.membership = 8;
    EXPECT_TRUE(json::parse(run_config(cfg).out)["member_brute_force"].is_null());
    EXPECT_TRUE(is_valid_gridding(parse_grid(cli::detail::read_file(cfg.grid_path)), g));
}

TEST(CliDeterminism, RepeatedRunsAreByteIdentical) {
    for (Command c : {Command::predict, Command::count, Command::verify, Command::optimize}) {
        auto cfg = config_for(c, "fig1_right.grid", 6);
        cfg.samples = 3000;
        cfg.seed = 5;
        for (auto fmt : {OutputFormat::json, OutputFormat::csv}) {
            cfg.output = fmt;
            const auto first = run_config(cfg);
            EXPECT_EQ(first.out, run_config(cfg).out);
            cfg.threads = 2;
            EXPECT_EQ(first.out, run_config(cfg).out);
            cfg.threads = 1;
        }
    }
}

TEST(CliErrors, ExitCodes) {
    EXPECT_EQ(run_config(config_for(Command::count, "juxt.grid")).status, exit_usage);
    auto sample = config_for(Command::sample, "juxt.grid", 3);
    EXPECT_EQ(run_config(sample).status, exit_usage);
    EXPECT_EQ(run_config(config_for(Command::predict, "no_such.grid")).status, exit_no_input);

    auto bad_catalog = config_for(Command::predict, "skew_merged.grid");
    bad_catalog.catalog_path = grid_path("missing.catalog");
    EXPECT_EQ(run_config(bad_catalog).status, exit_no_input);

    auto ungridded_cap = config_for(Command::verify, "skew_merged.grid", 3);
    ungridded_cap.caps.ungridded = 2;
    EXPECT_EQ(run_config(ungridded_cap).status, exit_ok);

    auto budget = config_for(Command::sample, "fig1_right.grid", 12);
    budget.seed = 1;
    budget.list_budget = 10;
    const auto r = run_config(budget);
    EXPECT_EQ(r.status, exit_resource);
    EXPECT_NE(r.err.find("resource"), std::string::npos);

    // Rate cells cannot be counted.
    EXPECT_EQ(run_config(config_for(Command::count, "direct_rate.grid", 3)).status, exit_data);
}

TEST(CliErrors, ParseErrorsReportPosition) {
    const std::string path = std::string(GRIDGROW_BINARY_DIR) + "/bad.grid";
    {
        std::ofstream f(path);
        f << "inc dec\ninc Av(12";
    }
    RunConfig cfg;
    cfg.grid_path = path;
    const auto r = run_config(cfg);
    EXPECT_EQ(r.status, exit_data);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(CliCapOverride, EnvironmentValue) {
    RunConfig cfg;
    apply_cap_override(cfg, "3");
    EXPECT_EQ(cfg.caps.ungridded, 3u);
    EXPECT_EQ(cfg.caps.membership, 3u);
    apply_cap_override(cfg, nullptr);
    EXPECT_EQ(cfg.caps.ungridded, 3u);
    EXPECT_THROW(apply_cap_override(cfg, "x"), ContractError);

    auto count = config_for(Command::count, "juxt.grid", 4);
    apply_cap_override(count, "2");
    const auto rows = json::parse(run_config(count).out);
    EXPECT_FALSE(rows[2]["ungridded"].is_null());
    EXPECT_TRUE(rows[3]["ungridded"].is_null());
}

TEST(CliFormat, SeventeenSignificantDigits) {
    EXPECT_EQ(cli::detail::format_double(4.0), "4.0");
    EXPECT_EQ(cli::detail::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(cli::detail::format_double(1e-20), "9.9999999999999995e-21");
    std::ostringstream out;
    cli::detail::emit_json(out, cli::detail::Json{{"a", 0.25}, {"b", {1, "x", nullptr, true}}, {"c", 1.0 / 3.0}});
    EXPECT_EQ(out.str(), "{\"a\":0.25,\"b\":[1,\"x\",null,true],\"c\":0.33333333333333331}\n");
    EXPECT_EQ(json::parse(out.str())["c"].get<double>(), 1.0 / 3.0);
}
