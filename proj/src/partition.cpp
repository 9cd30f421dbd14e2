#include "esdf/partition.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace esdf {

namespace {

void check_canonical(const std::vector<int>& labels) {
    int max_seen = -1;
    for (int lab : labels) {
        if (lab < 0 || lab > max_seen + 1) {
            throw std::invalid_argument("labels are not in canonical first-occurrence form");
        }
        if (lab == max_seen + 1) ++max_seen;
    }
}

}  // namespace

Partition::Partition(std::vector<int> canonical_labels) : labels_(std::move(canonical_labels)) {
    if (labels_.empty()) {
        throw std::invalid_argument("empty partition");
    }
    check_canonical(labels_);
    int max_label = 0;
    for (int lab : labels_) max_label = std::max(max_label, lab);
    n_clusters_ = static_cast<std::size_t>(max_label) + 1;
}

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> sizes(n_clusters_, 0);
    for (int lab : labels_) ++sizes[static_cast<std::size_t>(lab)];
    return sizes;
}

std::vector<std::vector<std::size_t>> Partition::clusters() const {
    std::vector<std::vector<std::size_t>> groups(n_clusters_);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        groups[static_cast<std::size_t>(labels_[i])].push_back(i);
    }
    return groups;
}

Ensemble::Ensemble(std::vector<Partition> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw std::invalid_argument("ensemble must contain at least one partition");
    }
    const std::size_t n = members_.front().n_points();
    for (const Partition& p : members_) {
        if (p.n_points() != n) {
            throw std::invalid_argument("inconsistent ensemble");
        }
    }
}

DistinctEnsemble::DistinctEnsemble(std::vector<Partition> partitions,
                                   std::vector<std::size_t> frequencies)
    : partitions_(std::move(partitions)), frequencies_(std::move(frequencies)) {
    if (partitions_.empty()) {
        throw std::invalid_argument("distinct ensemble must contain at least one partition");
    }
    if (partitions_.size() != frequencies_.size()) {
        throw std::invalid_argument("frequency count does not match partition count");
    }
    for (std::size_t v : frequencies_) {
        if (v == 0) throw std::invalid_argument("frequencies must be positive");
        total_ += v;
    }
    for (std::size_t i = 0; i < partitions_.size(); ++i) {
        for (std::size_t j = i + 1; j < partitions_.size(); ++j) {
            if (partitions_[i] == partitions_[j]) {
                throw std::invalid_argument("distinct ensemble contains duplicate partitions");
            }
        }
    }
}

DistinctEnsemble deduplicate(const Ensemble& ensemble) {
    std::vector<Partition> distinct;
    std::vector<std::size_t> freq;
    // Canonical label vectors are directly comparable, so grouping equality
    // reduces to map lookup on the label sequence.
    std::map<std::vector<int>, std::size_t> index_of;
    for (const Partition& p : ensemble.members()) {
        auto [it, inserted] = index_of.try_emplace(p.labels(), distinct.size());
        if (inserted) {
            distinct.push_back(p);
            freq.push_back(1);
        } else {
            ++freq[it->second];
        }
    }
    return DistinctEnsemble(std::move(distinct), std::move(freq));
}

Ensemble read_ensemble(std::istream& in) {
    std::vector<Partition> members;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        std::vector<long> raw;
        long value;
        while (row >> value) raw.push_back(value);
        if (!row.eof()) {
            throw std::runtime_error("ensemble file line " + std::to_string(line_no) +
                                     ": non-integer label");
        }
        if (raw.empty()) continue;
        members.push_back(canonicalize(raw));
    }
    if (members.empty()) {
        throw std::runtime_error("ensemble file contains no partitions");
    }
    return Ensemble(std::move(members));
}

Ensemble read_ensemble_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
    try {
        return read_ensemble(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_ensemble(std::ostream& out, const Ensemble& ensemble) {
    for (const Partition& p : ensemble.members()) {
        const auto& labels = p.labels();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) out << ' ';
            out << labels[i];
        }
        out << '\n';
    }
}

void write_ensemble_file(const std::string& path, const Ensemble& ensemble) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write ensemble file: " + path);
    write_ensemble(out, ensemble);
}

Partition read_partition_file(const std::string& path) {
    Ensemble e = read_ensemble_file(path);
    if (e.size() != 1) {
        throw std::runtime_error(path + ": expected a single partition row, found " +
                                 std::to_string(e.size()));
    }
    return e.member(0);
}

void write_partition_file(const std::string& path, const Partition& partition) {
    write_ensemble_file(path, Ensemble({partition}));
}

}  // namespace esdf
