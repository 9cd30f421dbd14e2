#pragma once

#include <cstdint>
#include <vector>

#include "esdf/dataset.hpp"
#include "esdf/partition.hpp"

namespace esdf {

/// Settings for repeated k-means ensemble generation.
struct GeneratorConfig {
    std::size_t k = 2;            // clusters per run
    std::size_t runs = 200;       // ensemble size T
    std::uint64_t seed = 1;
    std::size_t max_iters = 100;
    double convergence_tol = 1e-6;  // max centroid movement
};

/// Lloyd's algorithm with Forgy initialization: initial centroids are k
/// distinct data points drawn by the seeded generator. Empty clusters are
/// repaired by reseeding them with the point currently farthest from its
/// centroid. The returned partition is canonical. If wss_trace is given it
/// receives the within-cluster sum of squares after every iteration; the
/// sequence is non-increasing.
Partition kmeans(const DataMatrix& data, std::size_t k, std::uint64_t seed,
                 std::size_t max_iters = 100, double tol = 1e-6,
                 std::vector<double>* wss_trace = nullptr);

/// cfg.runs independent k-means runs with per-run seeds split off cfg.seed.
/// Fully reproducible from (dataset, cfg); runs execute in parallel.
Ensemble generate_ensemble(const Dataset& dataset, const GeneratorConfig& cfg);

}  // namespace esdf
