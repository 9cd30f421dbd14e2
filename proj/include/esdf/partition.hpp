#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace esdf {

/// A hard clustering of n data points into k non-empty clusters.
///
/// Labels are dense 0-based cluster indices in canonical form: cluster j is
/// the j-th cluster to appear when scanning points left to right, so
/// labels[0] == 0 and every new index is 1 + the maximum seen so far.
/// Two label sequences describe the same grouping iff their canonical
/// forms are identical, which makes equality label-invariant.
class Partition {
public:
    explicit Partition(std::vector<int> canonical_labels);

    std::size_t n_points() const { return labels_.size(); }
    std::size_t n_clusters() const { return n_clusters_; }
    const std::vector<int>& labels() const { return labels_; }
    int label(std::size_t point) const { return labels_[point]; }

    /// Cluster sizes indexed by cluster label.
    std::vector<std::size_t> cluster_sizes() const;

    /// Point indices grouped by cluster label.
    std::vector<std::vector<std::size_t>> clusters() const;

    bool operator==(const Partition& other) const { return labels_ == other.labels_; }
    bool operator!=(const Partition& other) const { return !(*this == other); }

private:
    std::vector<int> labels_;
    std::size_t n_clusters_ = 0;
};

/// Relabel an arbitrary cluster-id sequence into canonical form.
/// Inputs inducing the same grouping of point indices map to the same
/// Partition regardless of how the clusters were named.
template <typename Id>
Partition canonicalize(std::span<const Id> raw_labels) {
    if (raw_labels.empty()) {
        throw std::invalid_argument("empty partition");
    }
    std::vector<int> canon(raw_labels.size());
    std::unordered_map<Id, int> remap;
    remap.reserve(16);
    int next = 0;
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        auto [it, inserted] = remap.try_emplace(raw_labels[i], next);
        if (inserted) ++next;
        canon[i] = it->second;
    }
    return Partition(std::move(canon));
}

template <typename Id>
Partition canonicalize(const std::vector<Id>& raw_labels) {
    return canonicalize(std::span<const Id>(raw_labels));
}

/// An ordered multiset of partitions of the same point set.
class Ensemble {
public:
    explicit Ensemble(std::vector<Partition> members);

    std::size_t size() const { return members_.size(); }
    std::size_t n_points() const { return members_.front().n_points(); }
    const Partition& member(std::size_t i) const { return members_[i]; }
    const std::vector<Partition>& members() const { return members_; }

private:
    std::vector<Partition> members_;
};

/// The distinct groupings of an ensemble with their multiplicities.
/// Order follows first appearance in the source ensemble.
class DistinctEnsemble {
public:
    DistinctEnsemble(std::vector<Partition> partitions, std::vector<std::size_t> frequencies);

    std::size_t size() const { return partitions_.size(); }
    std::size_t total() const { return total_; }
    const Partition& partition(std::size_t i) const { return partitions_[i]; }
    const std::vector<Partition>& partitions() const { return partitions_; }
    std::size_t frequency(std::size_t i) const { return frequencies_[i]; }
    const std::vector<std::size_t>& frequencies() const { return frequencies_; }

private:
    std::vector<Partition> partitions_;
    std::vector<std::size_t> frequencies_;
    std::size_t total_ = 0;
};

/// Collapse an ensemble to its distinct groupings and count frequencies.
DistinctEnsemble deduplicate(const Ensemble& ensemble);

/// Ensemble text format: one row per partition, whitespace-separated integer
/// labels, one column per data point. Lines starting with '#' are comments.
/// Rows are canonicalized on load.
Ensemble read_ensemble(std::istream& in);
Ensemble read_ensemble_file(const std::string& path);
void write_ensemble(std::ostream& out, const Ensemble& ensemble);
void write_ensemble_file(const std::string& path, const Ensemble& ensemble);

/// Single-partition convenience wrappers over the same row format.
Partition read_partition_file(const std::string& path);
void write_partition_file(const std::string& path, const Partition& partition);

}  // namespace esdf
