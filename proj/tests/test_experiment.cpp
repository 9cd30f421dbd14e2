#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "esdf/consensus.hpp"
#include "esdf/experiment.hpp"
#include "esdf/selection.hpp"
#include "esdf/similarity.hpp"
#include "esdf/util.hpp"

using namespace esdf;

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// A small labeled dataset with three noisy blobs; k-means ensembles on it
// carry several distinct local optima so selection has something to rank.
fs::path write_blobs_csv(const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path path = dir / "blobs.csv";
    std::ofstream out(path);
    Rng rng(71);
    const double centers[3][2] = {{0, 0}, {6, 0}, {3, 5}};
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 12; ++i) {
            out << format_double(centers[c][0] + 2.0 * rng.uniform()) << ','
                << format_double(centers[c][1] + 2.0 * rng.uniform()) << ",c" << c << '\n';
        }
    }
    return path;
}

ExperimentSpec blob_spec(const fs::path& work) {
    ExperimentSpec spec;
    spec.dataset_path = write_blobs_csv(work).string();
    spec.ensemble_size = 30;
    spec.ensemble_count = 2;
    spec.seed = 7;
    spec.out_dir = (work / "out").string();
    spec.restarts = 4;
    return spec;
}

}  // namespace

TEST_CASE("spec files parse with flag-style keys and overrides") {
    const fs::path dir = fs::temp_directory_path() / "esdf-spec";
    fs::create_directories(dir);
    const fs::path path = dir / "exp.spec";
    {
        std::ofstream out(path);
        out << "# experiment\n"
            << "dataset = data/iris.csv\n"
            << "label-col = last\n"
            << "size = 100\n"
            << "ensembles = 3\n"
            << "seed = 5\n"
            << "select = esdf,cas\n"
            << "consensus = cspa\n"
            << "k-sweep = 1:20\n"
            << "balance-tol = 0.1\n"
            << "standardize = true\n";
    }
    ExperimentSpec spec = read_spec_file(path.string());
    CHECK(spec.dataset_path == "data/iris.csv");
    CHECK(spec.ensemble_size == 100);
    CHECK(spec.ensemble_count == 3);
    CHECK(spec.seed == 5);
    CHECK(spec.selections == std::vector<std::string>{"esdf", "cas"});
    CHECK(spec.consensus_methods == std::vector<std::string>{"cspa"});
    CHECK(spec.sweep_lo == 1);
    CHECK(spec.sweep_hi == 20);
    CHECK(spec.balance_tolerance == doctest::Approx(0.1));
    CHECK(spec.standardize);

    apply_spec_entry(spec, "size", "200");
    CHECK(spec.ensemble_size == 200);
    CHECK_THROWS(apply_spec_entry(spec, "nonsense", "1"));
    CHECK_THROWS(apply_spec_entry(spec, "select", "magic"));
    CHECK_THROWS(apply_spec_entry(spec, "k-sweep", "5"));

    fs::remove_all(dir);
}

TEST_CASE("generate writes reproducible ensemble files") {
    const fs::path work = fs::temp_directory_path() / "esdf-generate";
    fs::remove_all(work);
    ExperimentSpec spec = blob_spec(work);
    spec.ensemble_size = 10;

    const GenerateOutputs first = cmd_generate(spec);
    REQUIRE(first.ensemble_files.size() == 2);
    std::vector<std::string> contents;
    for (const std::string& path : first.ensemble_files) {
        const Ensemble e = read_ensemble_file(path);
        CHECK(e.size() == 10);
        CHECK(e.n_points() == 36);
        contents.push_back(read_file(path));
    }
    // Regenerate into the same paths: byte-identical.
    cmd_generate(spec);
    for (std::size_t i = 0; i < first.ensemble_files.size(); ++i) {
        CHECK(read_file(first.ensemble_files[i]) == contents[i]);
    }
    fs::remove_all(work);
}

TEST_CASE("run emits one row per cell and an auditable summary") {
    const fs::path work = fs::temp_directory_path() / "esdf-run";
    fs::remove_all(work);
    ExperimentSpec spec = blob_spec(work);
    spec.ensemble_count = 1;
    spec.selections = {"none", "esdf", "diversity"};
    spec.consensus_methods = {"cspa"};
    spec.sweep_lo = 1;
    spec.sweep_hi = 3;

    const RunOutputs out = cmd_run(spec);
    // Cells: none -> 1 row; esdf, diversity -> 3 rows each (k in 1..3).
    std::size_t none_rows = 0, esdf_rows = 0, diversity_rows = 0;
    for (const ResultRow& row : out.rows) {
        CHECK(row.error.empty());
        CHECK(row.ar <= 1.0);
        if (row.selection == "none") ++none_rows;
        if (row.selection == "esdf") ++esdf_rows;
        if (row.selection == "diversity") ++diversity_rows;
    }
    CHECK(none_rows == 1);
    CHECK(esdf_rows == 3);
    CHECK(diversity_rows == 3);

    const std::string summary = read_file(out.summary_csv);
    CHECK(summary.find("blobs,0,none,cspa,") != std::string::npos);
    CHECK(summary.find("blobs,0,esdf,cspa,") != std::string::npos);
    fs::remove_all(work);
}

TEST_CASE("full-ensemble consensus equals cspa on frequency-expanded distinct partitions") {
    const fs::path work = fs::temp_directory_path() / "esdf-consistency";
    fs::remove_all(work);
    ExperimentSpec spec = blob_spec(work);
    spec.ensemble_count = 1;
    spec.selections = {"none"};
    spec.consensus_methods = {"cspa"};
    const RunOutputs out = cmd_run(spec);
    REQUIRE(out.rows.size() == 1);

    const Ensemble ensemble =
        read_ensemble_file((fs::path(spec.out_dir) / "ensemble-0.txt").string());
    const DistinctEnsemble de = deduplicate(ensemble);
    std::vector<Partition> expanded;
    for (std::size_t i = 0; i < de.size(); ++i) {
        for (std::size_t c = 0; c < de.frequency(i); ++c) expanded.push_back(de.partition(i));
    }
    ConsensusConfig cfg;
    cfg.method = ConsensusMethod::cspa;
    cfg.target_k = 3;
    const Partition direct = cspa(expanded, cfg);

    const Dataset ds = load_dataset(spec.dataset_path);
    CHECK(out.rows[0].ar == doctest::Approx(adjusted_rand(direct, *ds.true_labels)));
    fs::remove_all(work);
}

TEST_CASE("run records failures per row and keeps going") {
    const fs::path work = fs::temp_directory_path() / "esdf-failures";
    fs::remove_all(work);
    ExperimentSpec spec = blob_spec(work);
    spec.ensemble_count = 1;
    spec.selections = {"none", "esdf"};
    spec.consensus_methods = {"cspa"};
    spec.sweep_hi = 1;
    cmd_generate(spec);   // valid ensembles on disk
    spec.clusters = 37;   // consensus target exceeds n = 36: every cell fails

    const RunOutputs out = cmd_run(spec);
    REQUIRE(out.rows.size() == 2);
    for (const ResultRow& row : out.rows) CHECK(!row.error.empty());
    const std::string results = read_file(out.results_csv);
    CHECK(results.find("target_k exceeds") != std::string::npos);
    fs::remove_all(work);
}

TEST_CASE("sweep produces three curves that round-trip through csv") {
    const fs::path work = fs::temp_directory_path() / "esdf-sweep";
    fs::remove_all(work);
    ExperimentSpec spec = blob_spec(work);
    spec.consensus_methods = {"cspa"};

    const SweepOutputs out = cmd_sweep(spec);
    REQUIRE(out.curves.size() == 3);
    CHECK(out.curves[0].criterion == "diversity");
    CHECK(out.curves[1].criterion == "frequency");
    CHECK(out.curves[2].criterion == "weight");

    const Ensemble ensemble =
        read_ensemble_file((fs::path(spec.out_dir) / "ensemble-0.txt").string());
    const DistinctEnsemble de = deduplicate(ensemble);
    const std::size_t r = de.size();
    for (const SweepCurve& curve : out.curves) {
        CHECK(curve.ks.size() == r);
        CHECK(curve.ks.front() == 1);
        CHECK(curve.ks.back() == r);
    }
    // At k = r every criterion selects all distinct partitions, so the
    // curves coincide there.
    CHECK(out.curves[0].ar.back() == out.curves[1].ar.back());
    CHECK(out.curves[1].ar.back() == out.curves[2].ar.back());

    // Round-trip: parse sweep.csv and compare against the returned values.
    std::ifstream in(out.curves_csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "criterion,k,ar");
    std::size_t row_count = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const std::string criterion = line.substr(0, c1);
        const std::size_t k = std::stoul(line.substr(c1 + 1, c2 - c1 - 1));
        const double ar = std::stod(line.substr(c2 + 1));
        for (const SweepCurve& curve : out.curves) {
            if (curve.criterion != criterion) continue;
            CHECK(curve.ar[k - 1] == ar);  // exact round-trip via shortest repr
        }
        ++row_count;
    }
    CHECK(row_count == 3 * r);
    CHECK(fs::exists(out.svg));
    fs::remove_all(work);
}

TEST_CASE("embed emits deterministic scatter artifacts") {
    const fs::path work = fs::temp_directory_path() / "esdf-embed";
    fs::remove_all(work);
    ExperimentSpec spec = blob_spec(work);
    spec.ensemble_size = 60;
    spec.consensus_methods = {"cspa"};
    spec.n_neighbors = 4;
    spec.target_dim = 3;
    spec.dim_x = 0;
    spec.dim_y = 1;
    spec.select_k = 3;

    const EmbedOutputs out = cmd_embed(spec);
    const std::string csv_first = read_file(out.csv);
    CHECK(csv_first.find("ground-truth") != std::string::npos);
    CHECK(csv_first.find("consensus-esdf") != std::string::npos);
    CHECK(fs::exists(out.svg));

    const EmbedOutputs again = cmd_embed(spec);
    CHECK(read_file(again.csv) == csv_first);
    fs::remove_all(work);
}
