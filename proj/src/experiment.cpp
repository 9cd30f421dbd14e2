#include "esdf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "esdf/embedding.hpp"
#include "esdf/generator.hpp"
#include "esdf/selection.hpp"
#include "esdf/similarity.hpp"
#include "esdf/util.hpp"

namespace esdf {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::size_t parse_count(const std::string& value, const std::string& key) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad value for " + key + ": " + value);
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw std::invalid_argument("bad boolean for " + key + ": " + value);
}

std::string ensemble_path(const ExperimentSpec& spec, std::size_t id) {
    return (fs::path(spec.out_dir) / ("ensemble-" + std::to_string(id) + ".txt")).string();
}

Dataset load_spec_dataset(const ExperimentSpec& spec) {
    if (spec.dataset_path.empty()) throw std::invalid_argument("no dataset given");
    LoadOptions opts;
    opts.label_column = spec.label_column;
    opts.drop_columns = spec.drop_columns;
    opts.standardize = spec.standardize;
    return load_dataset(spec.dataset_path, opts);
}

std::size_t resolve_clusters(const ExperimentSpec& spec, const Dataset& ds) {
    if (spec.clusters > 0) return spec.clusters;
    if (!ds.true_labels) {
        throw std::invalid_argument(
            "cluster count unknown: pass --k or provide a labeled dataset");
    }
    return ds.true_labels->n_clusters();
}

void check_sweep_range(const ExperimentSpec& spec) {
    if (spec.sweep_hi > spec.ensemble_size) {
        throw std::invalid_argument("k-sweep range exceeds the ensemble size " +
                                    std::to_string(spec.ensemble_size));
    }
}

Ensemble load_or_generate_ensemble(const ExperimentSpec& spec, const Dataset& ds,
                                   std::size_t clusters, std::size_t id) {
    const std::string path = ensemble_path(spec, id);
    if (fs::exists(path)) return read_ensemble_file(path);
    GeneratorConfig cfg;
    cfg.k = clusters;
    cfg.runs = spec.ensemble_size;
    cfg.seed = split_seed(spec.seed, id);
    Ensemble ensemble = generate_ensemble(ds, cfg);
    fs::create_directories(spec.out_dir);
    write_ensemble_file(path, ensemble);
    return ensemble;
}

std::vector<Partition> gather(const DistinctEnsemble& de, const std::vector<std::size_t>& idx) {
    std::vector<Partition> subset;
    subset.reserve(idx.size());
    for (std::size_t i : idx) subset.push_back(de.partition(i));
    return subset;
}

ConsensusConfig consensus_config(const ExperimentSpec& spec, const std::string& method,
                                 std::size_t target_k) {
    ConsensusConfig cfg;
    cfg.method = parse_consensus_method(method);
    cfg.target_k = target_k;
    cfg.linkage = spec.linkage;
    cfg.balance_tolerance = spec.balance_tolerance;
    cfg.restarts = spec.restarts;
    cfg.seed = spec.seed;
    return cfg;
}

std::vector<std::size_t> select_indices(const std::string& method, const DistinctEnsemble& de,
                                        const SimilarityMatrix& sim, const WeightTable& wt,
                                        std::size_t k) {
    if (method == "cas") return cas_select(de, sim, k).selected_indices;
    // "esdf" is the weight criterion; "diversity"/"frequency" name themselves.
    const Criterion criterion =
        method == "esdf" ? Criterion::weight : parse_criterion(method);
    return select_top_k(de, wt, criterion, k).selected_indices;
}

// Line chart of the three criterion curves, colors matching the usual
// diversity/frequency/weight rendering (blue/green/red).
void write_sweep_svg(const std::string& path, const std::vector<SweepCurve>& curves) {
    const double width = 720.0, height = 480.0, pad = 50.0;
    double min_ar = std::numeric_limits<double>::infinity();
    double max_ar = -std::numeric_limits<double>::infinity();
    std::size_t min_k = std::numeric_limits<std::size_t>::max();
    std::size_t max_k = 0;
    for (const SweepCurve& curve : curves) {
        for (double ar : curve.ar) {
            min_ar = std::min(min_ar, ar);
            max_ar = std::max(max_ar, ar);
        }
        for (std::size_t k : curve.ks) {
            min_k = std::min(min_k, k);
            max_k = std::max(max_k, k);
        }
    }
    const double span_ar = max_ar > min_ar ? max_ar - min_ar : 1.0;
    const double span_k = max_k > min_k ? static_cast<double>(max_k - min_k) : 1.0;
    auto sx = [&](std::size_t k) {
        return pad + static_cast<double>(k - min_k) / span_k * (width - 2 * pad);
    };
    auto sy = [&](double ar) { return height - pad - (ar - min_ar) / span_ar * (height - 2 * pad); };

    std::ofstream svg(path);
    if (!svg) throw std::runtime_error("cannot write " + path);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad
        << "\" y2=\"" << height - pad << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
        << height - pad << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"" << height - 12.0
        << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">selected"
           " ensemble size k</text>\n"
        << "<text x=\"14\" y=\"" << height / 2
        << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\""
           " transform=\"rotate(-90 14 " << height / 2 << ")\">adjusted Rand index</text>\n";
    const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728"};
    double ly = pad / 2.0;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const SweepCurve& curve = curves[c];
        svg << "<polyline fill=\"none\" stroke=\"" << colors[c % 3]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < curve.ks.size(); ++i) {
            if (i) svg << ' ';
            svg << sx(curve.ks[i]) << ',' << sy(curve.ar[i]);
        }
        svg << "\"/>\n"
            << "<text x=\"" << width - 150.0 << "\" y=\"" << ly + 4.0
            << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << colors[c % 3] << "\">"
            << curve.criterion << "</text>\n";
        ly += 16.0;
    }
    svg << "</svg>\n";
}

}  // namespace

void apply_spec_entry(ExperimentSpec& spec, const std::string& key, const std::string& value) {
    if (key == "dataset") {
        spec.dataset_path = value;
    } else if (key == "label-col") {
        spec.label_column = value;
    } else if (key == "drop-cols") {
        spec.drop_columns.clear();
        for (const std::string& item : split_list(value, ',')) {
            spec.drop_columns.push_back(parse_count(item, key));
        }
    } else if (key == "standardize") {
        spec.standardize = parse_bool(value, key);
    } else if (key == "k") {
        spec.clusters = parse_count(value, key);
    } else if (key == "size") {
        spec.ensemble_size = parse_count(value, key);
        if (spec.ensemble_size < 1) throw std::invalid_argument("size must be positive");
    } else if (key == "ensembles") {
        spec.ensemble_count = parse_count(value, key);
        if (spec.ensemble_count < 1) throw std::invalid_argument("ensembles must be positive");
    } else if (key == "seed") {
        spec.seed = parse_count(value, key);
    } else if (key == "select") {
        spec.selections = split_list(value, ',');
        for (const std::string& s : spec.selections) {
            if (s != "none" && s != "cas" && s != "esdf" && s != "diversity" &&
                s != "frequency") {
                throw std::invalid_argument("unknown selection method: " + s);
            }
        }
    } else if (key == "consensus") {
        spec.consensus_methods = split_list(value, ',');
        for (const std::string& m : spec.consensus_methods) parse_consensus_method(m);
    } else if (key == "k-sweep") {
        const auto parts = split_list(value, ':');
        if (parts.size() != 2) throw std::invalid_argument("k-sweep expects a:b");
        spec.sweep_lo = parse_count(parts[0], key);
        spec.sweep_hi = parse_count(parts[1], key);
        if (spec.sweep_lo < 1) throw std::invalid_argument("k-sweep start must be >= 1");
        if (spec.sweep_hi != 0 && spec.sweep_hi < spec.sweep_lo) {
            throw std::invalid_argument("k-sweep range is empty");
        }
    } else if (key == "linkage") {
        spec.linkage = parse_linkage(value);
    } else if (key == "balance-tol") {
        spec.balance_tolerance = std::stod(value);
    } else if (key == "restarts") {
        spec.restarts = parse_count(value, key);
    } else if (key == "distinct-only") {
        spec.distinct_only_full = parse_bool(value, key);
    } else if (key == "out") {
        spec.out_dir = value;
    } else if (key == "neighbors") {
        spec.n_neighbors = parse_count(value, key);
    } else if (key == "target-dim") {
        spec.target_dim = parse_count(value, key);
    } else if (key == "dims") {
        const auto parts = split_list(value, ',');
        if (parts.size() != 2) throw std::invalid_argument("dims expects x,y");
        spec.dim_x = parse_count(parts[0], key);
        spec.dim_y = parse_count(parts[1], key);
    } else if (key == "select-k") {
        spec.select_k = parse_count(value, key);
    } else {
        throw std::invalid_argument("unknown spec key: " + key);
    }
}

ExperimentSpec read_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    ExperimentSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        try {
            apply_spec_entry(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return spec;
}

GenerateOutputs cmd_generate(const ExperimentSpec& spec) {
    const Dataset ds = load_spec_dataset(spec);
    const std::size_t clusters = resolve_clusters(spec, ds);
    fs::create_directories(spec.out_dir);
    GenerateOutputs out;
    for (std::size_t id = 0; id < spec.ensemble_count; ++id) {
        GeneratorConfig cfg;
        cfg.k = clusters;
        cfg.runs = spec.ensemble_size;
        cfg.seed = split_seed(spec.seed, id);
        const Ensemble ensemble = generate_ensemble(ds, cfg);
        const std::string path = ensemble_path(spec, id);
        write_ensemble_file(path, ensemble);
        out.ensemble_files.push_back(path);
    }
    return out;
}

RunOutputs cmd_run(const ExperimentSpec& spec) {
    const Dataset ds = load_spec_dataset(spec);
    if (!ds.true_labels) {
        throw std::invalid_argument("run requires a labeled dataset to score consensus AR");
    }
    const std::size_t clusters = resolve_clusters(spec, ds);
    const Partition& truth = *ds.true_labels;
    fs::create_directories(spec.out_dir);

    std::vector<ResultRow> rows;
    // Best consensus partition per (ensemble, selection, consensus) cell,
    // persisted alongside the CSVs in the ensemble row format.
    struct BestCell {
        double ar = -std::numeric_limits<double>::infinity();
        std::optional<Partition> partition;
    };
    std::map<std::string, BestCell> best_cells;
    auto cell_key = [](std::size_t id, const std::string& selection, const std::string& method) {
        return "consensus-e" + std::to_string(id) + "-" + selection + "-" + method + ".txt";
    };

    for (std::size_t id = 0; id < spec.ensemble_count; ++id) {
        const Ensemble ensemble = load_or_generate_ensemble(spec, ds, clusters, id);
        const DistinctEnsemble de = deduplicate(ensemble);
        const SimilarityMatrix sim = pairwise_ari(de);
        const WeightTable wt = weights(de, sim);
        write_weights_csv(
            (fs::path(spec.out_dir) / ("weights-e" + std::to_string(id) + ".csv")).string(), de,
            wt);
        const std::size_t r = de.size();
        // 0 sweeps the distinct count; an explicit range is honored as
        // declared (selection caps at min(k, r) itself) so no cell is
        // silently skipped.
        const std::size_t hi = spec.sweep_hi == 0 ? r : spec.sweep_hi;

        auto run_cell = [&](const std::string& selection, const std::string& method,
                            std::size_t k, const std::vector<Partition>& subset) {
            ResultRow row;
            row.dataset = ds.name;
            row.ensemble_id = id;
            row.selection = selection;
            row.consensus = method;
            row.k = k;
            try {
                const Partition result = consensus(subset, consensus_config(spec, method, clusters));
                row.ar = adjusted_rand(result, truth);
                auto& best = best_cells[cell_key(id, selection, method)];
                if (!best.partition || row.ar > best.ar) {
                    best.ar = row.ar;
                    best.partition = result;
                }
            } catch (const std::exception& ex) {
                row.ar = std::nan("");
                row.error = ex.what();
            }
            rows.push_back(std::move(row));
        };

        for (const std::string& selection : spec.selections) {
            if (selection == "none") {
                const std::vector<Partition>& full =
                    spec.distinct_only_full ? de.partitions() : ensemble.members();
                for (const std::string& method : spec.consensus_methods) {
                    run_cell(selection, method, 0, full);
                }
                continue;
            }
            for (std::size_t k = spec.sweep_lo; k <= hi; ++k) {
                const std::vector<Partition> subset =
                    gather(de, select_indices(selection, de, sim, wt, k));
                for (const std::string& method : spec.consensus_methods) {
                    run_cell(selection, method, k, subset);
                }
            }
        }
    }

    for (const auto& [name, cell] : best_cells) {
        if (cell.partition) {
            write_partition_file((fs::path(spec.out_dir) / name).string(), *cell.partition);
        }
    }

    RunOutputs out;
    out.results_csv = (fs::path(spec.out_dir) / "results.csv").string();
    out.summary_csv = (fs::path(spec.out_dir) / "summary.csv").string();

    std::ofstream results(out.results_csv);
    if (!results) throw std::runtime_error("cannot write " + out.results_csv);
    results << "dataset,ensemble,selection,consensus,k,ar,error\n";
    for (const ResultRow& row : rows) {
        results << row.dataset << ',' << row.ensemble_id << ',' << row.selection << ','
                << row.consensus << ',';
        if (row.k > 0) results << row.k;
        results << ',';
        if (row.error.empty()) results << format_double(row.ar);
        results << ',' << row.error << '\n';
    }
    results.close();

    std::ofstream summary(out.summary_csv);
    if (!summary) throw std::runtime_error("cannot write " + out.summary_csv);
    summary << "dataset,ensemble,selection,consensus,max_ar,argmax_k,mean_ar\n";
    for (std::size_t id = 0; id < spec.ensemble_count; ++id) {
        for (const std::string& selection : spec.selections) {
            for (const std::string& method : spec.consensus_methods) {
                double max_ar = -std::numeric_limits<double>::infinity();
                std::size_t argmax_k = 0;
                double sum = 0.0;
                std::size_t count = 0;
                for (const ResultRow& row : rows) {
                    if (row.ensemble_id != id || row.selection != selection ||
                        row.consensus != method || !row.error.empty()) {
                        continue;
                    }
                    if (row.ar > max_ar) {
                        max_ar = row.ar;
                        argmax_k = row.k;
                    }
                    sum += row.ar;
                    ++count;
                }
                if (count == 0) continue;
                summary << ds.name << ',' << id << ',' << selection << ',' << method << ','
                        << format_double(max_ar) << ',';
                if (argmax_k > 0) summary << argmax_k;
                summary << ',' << format_double(sum / static_cast<double>(count)) << '\n';
            }
        }
    }
    out.rows = std::move(rows);
    return out;
}

SweepOutputs cmd_sweep(const ExperimentSpec& spec) {
    const Dataset ds = load_spec_dataset(spec);
    if (!ds.true_labels) {
        throw std::invalid_argument("sweep requires a labeled dataset to score consensus AR");
    }
    const std::size_t clusters = resolve_clusters(spec, ds);
    const Partition& truth = *ds.true_labels;
    fs::create_directories(spec.out_dir);

    const Ensemble ensemble = load_or_generate_ensemble(spec, ds, clusters, 0);
    const DistinctEnsemble de = deduplicate(ensemble);
    const SimilarityMatrix sim = pairwise_ari(de);
    const WeightTable wt = weights(de, sim);
    const std::size_t r = de.size();
    const std::size_t hi = spec.sweep_hi == 0 ? r : spec.sweep_hi;
    const std::string method = spec.consensus_methods.front();

    SweepOutputs out;
    for (const std::string criterion : {"diversity", "frequency", "weight"}) {
        SweepCurve curve;
        curve.criterion = criterion;
        for (std::size_t k = spec.sweep_lo; k <= hi; ++k) {
            const auto idx = select_top_k(de, wt, parse_criterion(criterion), k).selected_indices;
            const Partition result =
                consensus(gather(de, idx), consensus_config(spec, method, clusters));
            curve.ks.push_back(k);
            curve.ar.push_back(adjusted_rand(result, truth));
        }
        curve.max_ar = *std::max_element(curve.ar.begin(), curve.ar.end());
        curve.mean_ar = std::accumulate(curve.ar.begin(), curve.ar.end(), 0.0) /
                        static_cast<double>(curve.ar.size());
        out.curves.push_back(std::move(curve));
    }

    out.curves_csv = (fs::path(spec.out_dir) / "sweep.csv").string();
    out.summary_csv = (fs::path(spec.out_dir) / "sweep_summary.csv").string();
    out.svg = (fs::path(spec.out_dir) / "sweep.svg").string();

    std::ofstream csv(out.curves_csv);
    if (!csv) throw std::runtime_error("cannot write " + out.curves_csv);
    csv << "criterion,k,ar\n";
    for (const SweepCurve& curve : out.curves) {
        for (std::size_t i = 0; i < curve.ks.size(); ++i) {
            csv << curve.criterion << ',' << curve.ks[i] << ',' << format_double(curve.ar[i])
                << '\n';
        }
    }
    csv.close();

    std::ofstream summary(out.summary_csv);
    if (!summary) throw std::runtime_error("cannot write " + out.summary_csv);
    summary << "criterion,max_ar,mean_ar\n";
    for (const SweepCurve& curve : out.curves) {
        summary << curve.criterion << ',' << format_double(curve.max_ar) << ','
                << format_double(curve.mean_ar) << '\n';
    }
    summary.close();

    write_sweep_svg(out.svg, out.curves);
    return out;
}

EmbedOutputs cmd_embed(const ExperimentSpec& spec) {
    const Dataset ds = load_spec_dataset(spec);
    if (!ds.true_labels) {
        throw std::invalid_argument("embed requires a labeled dataset (ground truth is plotted)");
    }
    const std::size_t clusters = resolve_clusters(spec, ds);
    fs::create_directories(spec.out_dir);

    const Ensemble ensemble = load_or_generate_ensemble(spec, ds, clusters, 0);
    const DistinctEnsemble de = deduplicate(ensemble);
    const SimilarityMatrix sim = pairwise_ari(de);
    const WeightTable wt = weights(de, sim);
    const std::size_t r = de.size();
    const std::size_t select_k = spec.select_k > 0 ? spec.select_k : std::min<std::size_t>(10, r);

    const auto esdf_idx = select_top_k(de, wt, Criterion::weight, select_k).selected_indices;
    const auto cas_idx = cas_select(de, sim, select_k).selected_indices;

    const std::string method = spec.consensus_methods.front();
    const ConsensusConfig ccfg = consensus_config(spec, method, clusters);
    const std::vector<Partition>& full =
        spec.distinct_only_full ? de.partitions() : ensemble.members();

    std::vector<Partition> all = de.partitions();
    all.push_back(*ds.true_labels);
    all.push_back(consensus(full, ccfg));
    all.push_back(consensus(gather(de, cas_idx), ccfg));
    all.push_back(consensus(gather(de, esdf_idx), ccfg));

    const SimilarityMatrix augmented = pairwise_ari(all);
    const std::vector<double> dist = partition_distance_matrix(augmented);

    EmbeddingConfig ecfg;
    ecfg.n_neighbors = spec.n_neighbors;
    ecfg.target_dim = spec.target_dim;
    const Embedding embedding = lle(dist, all.size(), ecfg);

    ScatterAnnotations ann;
    ann.esdf_selected = esdf_idx;
    ann.cas_selected = cas_idx;
    ann.ground_truth = r;
    ann.consensus_full = r + 1;
    ann.consensus_cas = r + 2;
    ann.consensus_esdf = r + 3;

    EmbedOutputs out;
    out.svg = (fs::path(spec.out_dir) / "embedding.svg").string();
    out.csv = (fs::path(spec.out_dir) / "embedding.csv").string();
    emit_scatter(embedding, {spec.dim_x, spec.dim_y}, ann, out.svg, out.csv);
    return out;
}

}  // namespace esdf
