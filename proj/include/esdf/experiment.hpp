#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esdf/agglomerative.hpp"
#include "esdf/consensus.hpp"
#include "esdf/dataset.hpp"

namespace esdf {

/// Everything one experiment needs, settable from a flat key=value spec
/// file and/or command-line flags. Every command is a pure function of the
/// spec and its input files, so reruns produce identical outputs.
struct ExperimentSpec {
    std::string dataset_path;
    std::string label_column = "last";
    std::vector<std::size_t> drop_columns;
    bool standardize = false;

    std::size_t clusters = 0;  // k-means k and consensus target; 0 = class count
    std::size_t ensemble_size = 200;
    std::size_t ensemble_count = 3;
    std::uint64_t seed = 1;

    std::vector<std::string> selections = {"none", "cas", "esdf", "diversity", "frequency"};
    std::vector<std::string> consensus_methods = {"cspa", "hgpa"};
    std::size_t sweep_lo = 1;
    std::size_t sweep_hi = 0;  // 0 = sweep up to r, the distinct-partition count

    Linkage linkage = Linkage::average;
    double balance_tolerance = 0.05;
    std::size_t restarts = 8;
    bool distinct_only_full = false;  // full-ensemble consensus over distinct partitions only

    std::string out_dir = ".";

    // embed command
    std::size_t n_neighbors = 10;
    std::size_t target_dim = 5;
    std::size_t dim_x = 2;
    std::size_t dim_y = 3;
    std::size_t select_k = 0;  // selection size highlighted in the embedding; 0 = min(10, r)
};

/// Apply one key=value entry (file line or flag). Throws on unknown keys
/// or unparseable values.
void apply_spec_entry(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Flat key=value file; '#' comments and blank lines ignored.
ExperimentSpec read_spec_file(const std::string& path);

struct ResultRow {
    std::string dataset;
    std::size_t ensemble_id = 0;
    std::string selection;
    std::string consensus;
    std::size_t k = 0;  // 0 when the cell has no selection size
    double ar = 0.0;
    std::string error;  // empty on success
};

/// Paths of files a command produced.
struct GenerateOutputs {
    std::vector<std::string> ensemble_files;
};
struct RunOutputs {
    std::string results_csv;
    std::string summary_csv;
    std::vector<ResultRow> rows;
};
struct SweepCurve {
    std::string criterion;
    std::vector<std::size_t> ks;
    std::vector<double> ar;
    double max_ar = 0.0;
    double mean_ar = 0.0;
};
struct SweepOutputs {
    std::string curves_csv;
    std::string summary_csv;
    std::string svg;
    std::vector<SweepCurve> curves;
};
struct EmbedOutputs {
    std::string svg;
    std::string csv;
};

/// Write `ensemble-<id>.txt` files per the ensemble text format,
/// reproducible from the base seed.
GenerateOutputs cmd_generate(const ExperimentSpec& spec);

/// One ResultRow per (ensemble, selection, consensus, k) cell plus a
/// max-over-k summary per cell group. Cell failures land in the row's
/// error column; the run continues.
RunOutputs cmd_run(const ExperimentSpec& spec);

/// AR-vs-k curves for the diversity, frequency and weight criteria on the
/// first ensemble.
SweepOutputs cmd_sweep(const ExperimentSpec& spec);

/// LLE embedding of the distinct partitions with ESDF/CAS selections,
/// ground truth and the three consensus partitions embedded jointly.
EmbedOutputs cmd_embed(const ExperimentSpec& spec);

}  // namespace esdf
