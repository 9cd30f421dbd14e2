#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "esdf/partition.hpp"
#include "esdf/similarity.hpp"

namespace esdf {

enum class Criterion { weight, diversity, frequency, cas };

Criterion parse_criterion(const std::string& name);
std::string criterion_name(Criterion c);

/// Indices of selected distinct partitions, ordered by the criterion.
struct SelectionResult {
    std::vector<std::size_t> selected_indices;
    Criterion criterion = Criterion::weight;
    std::size_t k = 0;  // requested size; selected size is min(k, r)
};

/// Full permutation of 0..r-1 sorted descending by the chosen criterion
/// value (weight, diversity or frequency). Ties keep ascending
/// first-appearance order.
std::vector<std::size_t> rank_partitions(const DistinctEnsemble& e, const WeightTable& wt,
                                         Criterion criterion);

/// Top-k selection by a value criterion over an already-analyzed ensemble.
SelectionResult select_top_k(const DistinctEnsemble& e, const WeightTable& wt,
                             Criterion criterion, std::size_t k);

/// The ESDF pipeline: deduplicate, pairwise ARI, weights, then take the
/// min(k, r) heaviest partitions.
SelectionResult esdf_select(const Ensemble& ensemble, std::size_t k);

/// Cluster-and-select baseline: group the distinct partitions into
/// min(k, r) groups by average-linkage clustering on 1 - ARI, then keep
/// the highest-MAR partition of each group, ordered by descending MAR.
SelectionResult cas_select(const DistinctEnsemble& e, const SimilarityMatrix& s, std::size_t k);

/// CSV export, one row per selected partition:
/// `rank,partition_index,frequency,mar,diversity,weight`.
void write_selection_csv(const std::string& path, const SelectionResult& result,
                         const DistinctEnsemble& e, const WeightTable& wt);

}  // namespace esdf
