#include "esdf/selection.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "esdf/agglomerative.hpp"
#include "esdf/util.hpp"

namespace esdf {

Criterion parse_criterion(const std::string& name) {
    if (name == "weight") return Criterion::weight;
    if (name == "diversity") return Criterion::diversity;
    if (name == "frequency") return Criterion::frequency;
    if (name == "cas") return Criterion::cas;
    throw std::invalid_argument("unknown criterion: " + name);
}

std::string criterion_name(Criterion c) {
    switch (c) {
        case Criterion::weight: return "weight";
        case Criterion::diversity: return "diversity";
        case Criterion::frequency: return "frequency";
        case Criterion::cas: return "cas";
    }
    return "weight";
}

std::vector<std::size_t> rank_partitions(const DistinctEnsemble& e, const WeightTable& wt,
                                         Criterion criterion) {
    const std::size_t r = e.size();
    if (wt.weight.size() != r) {
        throw std::invalid_argument("rank_partitions: weight table does not match ensemble");
    }
    std::vector<double> value(r);
    switch (criterion) {
        case Criterion::weight:
            value = wt.weight;
            break;
        case Criterion::diversity:
            value = wt.diversity;
            break;
        case Criterion::frequency:
            for (std::size_t i = 0; i < r; ++i) value[i] = static_cast<double>(e.frequency(i));
            break;
        default:
            throw std::invalid_argument("rank_partitions: criterion has no per-partition value");
    }
    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
    return order;
}

SelectionResult select_top_k(const DistinctEnsemble& e, const WeightTable& wt,
                             Criterion criterion, std::size_t k) {
    if (k < 1) throw std::invalid_argument("selection size k must be at least 1");
    std::vector<std::size_t> order = rank_partitions(e, wt, criterion);
    const std::size_t take = std::min(k, e.size());
    order.resize(take);
    return SelectionResult{std::move(order), criterion, k};
}

SelectionResult esdf_select(const Ensemble& ensemble, std::size_t k) {
    const DistinctEnsemble distinct = deduplicate(ensemble);
    const SimilarityMatrix sim = pairwise_ari(distinct);
    const WeightTable wt = weights(distinct, sim);
    return select_top_k(distinct, wt, Criterion::weight, k);
}

SelectionResult cas_select(const DistinctEnsemble& e, const SimilarityMatrix& s, std::size_t k) {
    if (k < 1) throw std::invalid_argument("selection size k must be at least 1");
    const std::size_t r = e.size();
    if (s.size() != r) {
        throw std::invalid_argument("cas_select: similarity matrix does not match ensemble");
    }
    const std::size_t groups = std::min(k, r);

    std::vector<double> dist(r * r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            dist[i * r + j] = i == j ? 0.0 : 1.0 - s.at(i, j);
        }
    }
    const std::vector<int> group_of = agglomerate(dist, r, groups, Linkage::average);

    // Quality score: mean similarity to the rest of the ensemble.
    std::vector<double> mar(r, 0.0);
    if (r > 1) {
        for (std::size_t i = 0; i < r; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                if (j != i) sum += s.at(i, j);
            }
            mar[i] = sum / static_cast<double>(r - 1);
        }
    }

    std::vector<std::size_t> representative(groups, r);
    for (std::size_t i = 0; i < r; ++i) {
        std::size_t g = static_cast<std::size_t>(group_of[i]);
        if (representative[g] == r || mar[i] > mar[representative[g]]) {
            representative[g] = i;
        }
    }
    std::stable_sort(representative.begin(), representative.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (mar[a] != mar[b]) return mar[a] > mar[b];
                         return a < b;
                     });
    return SelectionResult{std::move(representative), Criterion::cas, k};
}

void write_selection_csv(const std::string& path, const SelectionResult& result,
                         const DistinctEnsemble& e, const WeightTable& wt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "rank,partition_index,frequency,mar,diversity,weight\n";
    for (std::size_t rank = 0; rank < result.selected_indices.size(); ++rank) {
        const std::size_t i = result.selected_indices[rank];
        out << rank << ',' << i << ',' << e.frequency(i) << ',' << format_double(wt.mar[i])
            << ',' << format_double(wt.diversity[i]) << ',' << format_double(wt.weight[i])
            << '\n';
    }
}

}  // namespace esdf
