#include <CLI11.hpp>

#include <iostream>
#include <utility>
#include <vector>

#include "esdf/experiment.hpp"
#include "esdf/partition.hpp"
#include "esdf/similarity.hpp"
#include "esdf/util.hpp"

namespace {

// Flags are collected as (key, value) pairs and replayed over the spec so
// that file entries and command-line overrides share one parser.
struct SpecArgs {
    std::string spec_file;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_spec_flags(CLI::App* cmd, SpecArgs& args) {
    cmd->add_option("--spec", args.spec_file, "key=value experiment spec file");
    auto capture = [&args](const std::string& key) {
        return [&args, key](const std::string& value) {
            args.overrides.emplace_back(key, value);
            return true;
        };
    };
    cmd->add_option_function<std::string>("--dataset", capture("dataset"),
                                          "dataset file (CSV or whitespace-delimited)");
    cmd->add_option_function<std::string>(
        "--label-col", capture("label-col"),
        "class column: first|last|none|<index>|name:<header>");
    cmd->add_option_function<std::string>("--drop-cols", capture("drop-cols"),
                                          "comma-separated column indices to drop");
    cmd->add_option_function<std::string>("--k", capture("k"),
                                          "clusters per run and consensus target "
                                          "(default: class count)");
    cmd->add_option_function<std::string>("--size", capture("size"), "ensemble size T");
    cmd->add_option_function<std::string>("--ensembles", capture("ensembles"),
                                          "number of ensembles");
    cmd->add_option_function<std::string>("--seed", capture("seed"), "base RNG seed");
    cmd->add_option_function<std::string>(
        "--select", capture("select"),
        "selection methods to compare: none|esdf|cas|diversity|frequency (comma list)");
    cmd->add_option_function<std::string>("--consensus", capture("consensus"),
                                          "consensus methods: cspa|hgpa (comma list)");
    cmd->add_option_function<std::string>("--k-sweep", capture("k-sweep"),
                                          "selection sizes to sweep, a:b (b=0 sweeps to r)");
    cmd->add_option_function<std::string>("--linkage", capture("linkage"),
                                          "CSPA linkage: single|average|complete");
    cmd->add_option_function<std::string>("--balance-tol", capture("balance-tol"),
                                          "HGPA part-size tolerance (default 0.05)");
    cmd->add_option_function<std::string>("--restarts", capture("restarts"),
                                          "HGPA refinement restarts (default 8)");
    cmd->add_flag_function(
        "--standardize",
        [&args](std::int64_t) { args.overrides.emplace_back("standardize", "true"); },
        "z-score features before clustering");
    cmd->add_flag_function(
        "--distinct-only",
        [&args](std::int64_t) { args.overrides.emplace_back("distinct-only", "true"); },
        "full-ensemble consensus over distinct partitions only");
    cmd->add_option_function<std::string>("--out", capture("out"), "output directory");
    cmd->add_option_function<std::string>("--neighbors", capture("neighbors"),
                                          "LLE neighborhood size (default 10)");
    cmd->add_option_function<std::string>("--target-dim", capture("target-dim"),
                                          "LLE target dimension (default 5)");
    cmd->add_option_function<std::string>("--dims", capture("dims"),
                                          "embedding axes to plot, x,y (default 2,3)");
    cmd->add_option_function<std::string>("--select-k", capture("select-k"),
                                          "selection size highlighted by embed");
}

esdf::ExperimentSpec build_spec(const SpecArgs& args) {
    esdf::ExperimentSpec spec;
    if (!args.spec_file.empty()) spec = esdf::read_spec_file(args.spec_file);
    for (const auto& [key, value] : args.overrides) {
        esdf::apply_spec_entry(spec, key, value);
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ESDF consensus-clustering toolkit: diversity-frequency ensemble selection"
                 " with CSPA/HGPA consensus"};
    app.require_subcommand(1);

    SpecArgs gen_args, run_args, sweep_args, embed_args;
    CLI::App* gen = app.add_subcommand("generate", "generate k-means ensembles");
    add_spec_flags(gen, gen_args);
    CLI::App* run = app.add_subcommand(
        "run", "selection x consensus comparison grid with per-cell max-over-k summary");
    add_spec_flags(run, run_args);
    CLI::App* sweep =
        app.add_subcommand("sweep", "AR-vs-k curves for diversity, frequency and weight");
    add_spec_flags(sweep, sweep_args);
    CLI::App* embed =
        app.add_subcommand("embed", "LLE embedding of the distinct partitions (SVG + CSV)");
    add_spec_flags(embed, embed_args);

    std::string ari_a, ari_b;
    CLI::App* ari = app.add_subcommand("ari", "adjusted Rand index of two partition files");
    ari->add_option("file_a", ari_a, "first partition file")->required();
    ari->add_option("file_b", ari_b, "second partition file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto out = esdf::cmd_generate(build_spec(gen_args));
            for (const std::string& path : out.ensemble_files) {
                std::cout << path << '\n';
            }
        } else if (run->parsed()) {
            const auto out = esdf::cmd_run(build_spec(run_args));
            std::cout << out.results_csv << '\n' << out.summary_csv << '\n';
        } else if (sweep->parsed()) {
            const auto out = esdf::cmd_sweep(build_spec(sweep_args));
            for (const auto& curve : out.curves) {
                std::cout << curve.criterion << ": max AR " << esdf::format_double(curve.max_ar)
                          << ", mean AR " << esdf::format_double(curve.mean_ar) << '\n';
            }
            std::cout << out.curves_csv << '\n' << out.summary_csv << '\n' << out.svg << '\n';
        } else if (embed->parsed()) {
            const auto out = esdf::cmd_embed(build_spec(embed_args));
            std::cout << out.svg << '\n' << out.csv << '\n';
        } else if (ari->parsed()) {
            const esdf::Partition a = esdf::read_partition_file(ari_a);
            const esdf::Partition b = esdf::read_partition_file(ari_b);
            std::cout << esdf::format_double(esdf::adjusted_rand(a, b)) << '\n';
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
