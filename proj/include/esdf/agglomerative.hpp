#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace esdf {

enum class Linkage { single, average, complete };

Linkage parse_linkage(const std::string& name);
std::string linkage_name(Linkage linkage);

/// Agglomerative clustering on a stored symmetric distance matrix (flat
/// row-major, size n*n), merged bottom-up until n_clusters remain.
/// Merge ties are broken by the smallest (i, j) cluster-index pair, so the
/// dendrogram cut is deterministic. Returns one cluster id per element in
/// [0, n_clusters); ids follow first appearance over element order.
std::vector<int> agglomerate(const std::vector<double>& distances, std::size_t n,
                             std::size_t n_clusters, Linkage linkage);

}  // namespace esdf
