#include "experiments.hpp"

#include "heatlab/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"heatlab: truncated-Laplacian heat flow experiments"};
    app.require_subcommand(1);

    heatlab::cli::RunOptions opt;
    std::string config;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "Run one experiment config and write report.json");
    run->add_option("config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    run->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")->capture_default_str();
    auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
    run->add_flag("--check-config", opt.dry_run, "Validate the config and exit");

    std::vector<std::string> reports;
    auto* table = app.add_subcommand("table", "Merge report.json files into a CSV table on stdout");
    table->add_option("reports", reports, "Report files")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*run) {
        if (*seed_opt) opt.seed = seed;
        try {
            return heatlab::cli::run_command(config, opt);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }

    try {
        std::vector<heatlab::cli::RunReport> parsed;
        std::vector<std::string> labels;
        for (const auto& path : reports) {
            std::ifstream in(path);
            parsed.push_back(heatlab::cli::RunReport::from_json(nlohmann::ordered_json::parse(in)));
            labels.push_back(std::filesystem::path(path).parent_path().filename().string());
            if (labels.back().empty()) labels.back() = path;
        }
        std::cout << heatlab::cli::merge_reports(parsed, labels);
    } catch (const heatlab::SchemaMismatch& e) {
        std::cerr << "schema mismatch: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
