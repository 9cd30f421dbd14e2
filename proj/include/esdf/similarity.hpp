#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "esdf/partition.hpp"

namespace esdf {

/// Cross-tabulation of two partitions: counts[r][s] is the number of points
/// in cluster r of the first partition and cluster s of the second.
struct ContingencyTable {
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> row_sums;
    std::vector<std::size_t> col_sums;
    std::size_t n = 0;
};

ContingencyTable contingency(const Partition& p, const Partition& q);

/// Hubert-Arabie adjusted Rand index between two partitions of the same
/// point set. 1 for identical groupings; can be negative for agreement
/// below chance. Binomial sums are carried in 128-bit integers so the
/// only rounding is the final division.
double adjusted_rand(const Partition& p, const Partition& q);

/// Symmetric r x r matrix of pairwise ARI values with unit diagonal.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::size_t r, std::vector<double> values);

    std::size_t size() const { return r_; }
    double at(std::size_t i, std::size_t j) const { return values_[i * r_ + j]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t r_;
    std::vector<double> values_;
};

/// All pairwise ARI values of a distinct ensemble. The upper triangle is
/// computed in parallel; results do not depend on worker count.
SimilarityMatrix pairwise_ari(const DistinctEnsemble& e);

/// Same computation over an arbitrary partition list (duplicates allowed),
/// used when extra partitions are appended to an analyzed ensemble.
SimilarityMatrix pairwise_ari(const std::vector<Partition>& partitions);

/// Per-partition mean ARI, diversity and diversity-frequency weight.
/// mar[i] averages row i of the similarity matrix over j != i,
/// diversity[i] = 1 - mar[i], weight[i] = diversity[i] * v_i / sum(v).
/// For a singleton ensemble diversity and weight are both defined as 1.
struct WeightTable {
    std::vector<double> mar;
    std::vector<double> diversity;
    std::vector<double> weight;
};

WeightTable weights(const DistinctEnsemble& e, const SimilarityMatrix& s);

/// CSV exports. Similarity rows are `i,j,ari` in row-major order; weight
/// rows are `i,frequency,mar,diversity,weight`.
void write_similarity_csv(const std::string& path, const SimilarityMatrix& s);
void write_weights_csv(const std::string& path, const DistinctEnsemble& e, const WeightTable& wt);

}  // namespace esdf
