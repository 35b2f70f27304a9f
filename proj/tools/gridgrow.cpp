#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gridgrow/cli.hpp"

using gridgrow::cli::Command;
using gridgrow::cli::OutputFormat;
using gridgrow::cli::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"gridgrow: growth rates of permutation grid classes"};
    app.require_subcommand(1);

    RunConfig config;
    std::string output = "json";
    std::uint64_t seed = 0;

    struct Spec {
        Command command;
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {Command::predict, "predict", "Predicted growth rate, singular vectors and blueprint matrix"},
        {Command::count, "count", "Exact gridded (and small ungridded) counts for lengths 0..n"},
        {Command::verify, "verify", "Sandwich, oracle and ratio-band checks against the prediction"},
        {Command::optimize, "optimize", "Variational checks: f at the blueprint and a random search"},
        {Command::sample, "sample", "Uniform gridded permutation drawn from the maximizing cell weights"},
    };

    std::map<CLI::App*, Command> commands;
    for (const auto& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        commands[sub] = s.command;
        sub->add_option("grid", config.grid_path, "Grid-spec file")->required();
        sub->add_option("--catalog", config.catalog_path, "Extra growth rates, lines of 'Av(...) = <real>'");
        sub->add_option("--tol", config.tol, "Power-iteration tolerance")->capture_default_str();
        sub->add_option("--output", output, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
        sub->add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--cap-membership", config.caps.membership, "Brute-force membership length cap")
            ->capture_default_str();
        sub->add_option("--cap-ungridded", config.caps.ungridded, "Brute-force ungridded counting cap")
            ->capture_default_str();
        if (s.command != Command::predict && s.command != Command::optimize)
            sub->add_option("--n", config.n, "Length")->required();
        if (s.command == Command::sample || s.command == Command::optimize) {
            auto* opt = sub->add_option("--seed", seed, "RNG seed");
            if (s.command == Command::sample) opt->required();
        }
        if (s.command == Command::optimize)
            sub->add_option("--samples", config.samples, "Random draws for the search")->capture_default_str();
        if (s.command == Command::sample)
            sub->add_option("--list-budget", config.list_budget, "Cell-class members kept in memory")
                ->capture_default_str();
        if (s.command == Command::verify) {
            sub->add_option("--band-low", config.band_low, "Lower ratio band, as a multiple of gr")->capture_default_str();
            sub->add_option("--band-high", config.band_high, "Upper ratio band, as a multiple of gr")
                ->capture_default_str();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return gridgrow::cli::exit_usage;
    }

    for (auto* sub : app.get_subcommands()) {
        config.command = commands.at(sub);
        if (const auto* opt = sub->get_option_no_throw("--seed"); opt && opt->count() > 0) config.seed = seed;
    }
    config.output = output == "csv" ? OutputFormat::csv : OutputFormat::json;
    try {
        gridgrow::cli::apply_cap_override(config, std::getenv("GRIDGROW_CAP_N"));
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return gridgrow::cli::exit_usage;
    }
    return gridgrow::cli::run(config, std::cout, std::cerr);
}
