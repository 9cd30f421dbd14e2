#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esdf/similarity.hpp"

namespace esdf {

struct EmbeddingConfig {
    std::size_t n_neighbors = 10;
    std::size_t target_dim = 5;
    double regularization = 1e-3;  // relative to the local Gram trace
};

/// Low-dimensional coordinates of r objects produced by distances-only LLE.
/// coordinates is r x target_dim (row per object, column-centered); each
/// reconstruction-weight row sums to 1 over the corresponding neighbors.
struct Embedding {
    std::vector<double> coordinates;  // row-major r x target_dim
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::vector<std::vector<std::size_t>> neighbor_lists;
    std::vector<std::vector<double>> reconstruction_weights;
    std::vector<double> eigenvalues;  // one per kept coordinate, per component

    double coord(std::size_t i, std::size_t dim) const { return coordinates[i * dims + dim]; }
};

/// d[i][j] = 1 - ARI(P_i, P_j): zero diagonal, symmetric.
std::vector<double> partition_distance_matrix(const SimilarityMatrix& s);

/// Locally Linear Embedding straight from a pairwise distance matrix
/// (flat row-major, r x r). Local Gram matrices are recovered from squared
/// neighborhood distances by double centering, regularized on the diagonal,
/// and the embedding coordinates are the eigenvectors of (I-W)^T (I-W) for
/// its smallest non-trivial eigenvalues. Deterministic, including the sign
/// convention (largest-magnitude entry of each column is positive).
/// A disconnected neighborhood graph triggers a stderr warning and each
/// component is embedded on its own.
Embedding lle(const std::vector<double>& distances, std::size_t r, const EmbeddingConfig& cfg);

/// Role labels for scatter output.
enum class PointRole {
    distinct,
    esdf_selected,
    cas_selected,
    both,
    ground_truth,
    consensus_full,
    consensus_cas,
    consensus_esdf,
};

std::string point_role_name(PointRole role);

struct ScatterAnnotations {
    std::vector<std::size_t> esdf_selected;
    std::vector<std::size_t> cas_selected;
    std::optional<std::size_t> ground_truth;
    std::optional<std::size_t> consensus_full;
    std::optional<std::size_t> consensus_cas;
    std::optional<std::size_t> consensus_esdf;
};

/// Write an SVG scatter of two embedding dimensions plus a CSV of
/// (index, x, y, role) with one row per embedded object.
void emit_scatter(const Embedding& embedding, std::pair<std::size_t, std::size_t> dims,
                  const ScatterAnnotations& annotations, const std::string& svg_path,
                  const std::string& csv_path);

}  // namespace esdf
