#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "esdf/agglomerative.hpp"
#include "esdf/partition.hpp"

namespace esdf {

/// n x n same-cluster fractions over a sub-ensemble: entry (a, b) is the
/// share of partitions placing a and b in the same cluster.
class CoassociationMatrix {
public:
    CoassociationMatrix(std::size_t n, std::vector<double> values);

    std::size_t size() const { return n_; }
    double at(std::size_t a, std::size_t b) const { return values_[a * n_ + b]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

CoassociationMatrix coassociation(const std::vector<Partition>& subset);

/// Dense row-major CSV dump, one row per data point, no header.
void write_coassociation_csv(const std::string& path, const CoassociationMatrix& m);

/// Clusters-as-hyperedges view of a sub-ensemble: one hyperedge per
/// (partition, cluster) pair. Duplicate partitions contribute duplicate
/// hyperedges on purpose.
struct Hypergraph {
    std::size_t n_vertices = 0;
    std::vector<std::vector<std::uint32_t>> hyperedges;
    std::vector<double> edge_weights;  // all 1 unless a caller overrides
};

Hypergraph build_hypergraph(const std::vector<Partition>& subset);

enum class ConsensusMethod { cspa, hgpa };

ConsensusMethod parse_consensus_method(const std::string& name);
std::string consensus_method_name(ConsensusMethod m);

struct ConsensusConfig {
    ConsensusMethod method = ConsensusMethod::cspa;
    std::size_t target_k = 2;
    // CSPA: linkage used to cut the co-association matrix.
    Linkage linkage = Linkage::average;
    // HGPA: allowed deviation of each part from the ideal size n/target_k,
    // number of seeded restarts per bisection, and the base seed.
    double balance_tolerance = 0.05;
    std::size_t restarts = 8;
    std::uint64_t seed = 1;
};

/// Consensus by average-linkage clustering of 1 - coassociation, cut at
/// target_k. The result has exactly target_k non-empty clusters.
Partition cspa(const std::vector<Partition>& subset, const ConsensusConfig& cfg);

/// Consensus by balanced minimum-cut hypergraph partitioning: recursive
/// bisection with Fiduccia-Mattheyses gain refinement and best-of-R seeded
/// restarts. Every part ends within (1 +/- balance_tolerance) * n/target_k,
/// bounds rounded outward.
Partition hgpa(const std::vector<Partition>& subset, const ConsensusConfig& cfg);

/// The partitioner behind hgpa, usable on any hypergraph.
Partition partition_hypergraph(const Hypergraph& hg, const ConsensusConfig& cfg);

/// Dispatch on cfg.method.
Partition consensus(const std::vector<Partition>& subset, const ConsensusConfig& cfg);

/// Weighted cut cost of a vertex assignment (hyperedge counted once when it
/// spans more than one part). Exposed for diagnostics and tests.
double hypergraph_cut(const Hypergraph& hg, const std::vector<int>& side);

}  // namespace esdf
