#include "esdf/agglomerative.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace esdf {

Linkage parse_linkage(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "average") return Linkage::average;
    if (name == "complete") return Linkage::complete;
    throw std::invalid_argument("unknown linkage: " + name + " (expected single|average|complete)");
}

std::string linkage_name(Linkage linkage) {
    switch (linkage) {
        case Linkage::single: return "single";
        case Linkage::average: return "average";
        case Linkage::complete: return "complete";
    }
    return "average";
}

namespace {

struct Candidate {
    double dist;
    std::uint32_t i;
    std::uint32_t j;
};

struct CandidateOrder {
    // min-heap on (dist, i, j)
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.dist != b.dist) return a.dist > b.dist;
        if (a.i != b.i) return a.i > b.i;
        return a.j > b.j;
    }
};

}  // namespace

std::vector<int> agglomerate(const std::vector<double>& distances, std::size_t n,
                             std::size_t n_clusters, Linkage linkage) {
    if (n == 0 || distances.size() != n * n) {
        throw std::invalid_argument("agglomerate: distance matrix has wrong shape");
    }
    if (n_clusters < 1 || n_clusters > n) {
        throw std::invalid_argument("agglomerate: cluster count out of range");
    }

    std::vector<double> d(distances);
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    // Cluster i keeps the members of everything merged into it.
    std::vector<std::vector<std::uint32_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {static_cast<std::uint32_t>(i)};

    std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            heap.push({d[i * n + j], static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
    }

    std::size_t remaining = n;
    while (remaining > n_clusters) {
        Candidate best{};
        for (;;) {
            if (heap.empty()) {
                throw std::logic_error("agglomerate: merge heap exhausted");
            }
            best = heap.top();
            heap.pop();
            // Stale entries carry a distance that no longer matches.
            if (active[best.i] && active[best.j] && d[best.i * n + best.j] == best.dist) break;
        }
        const std::size_t i = best.i;
        const std::size_t j = best.j;
        // Merge j into i (i < j), then refresh distances to the new cluster.
        active[j] = false;
        members[i].insert(members[i].end(), members[j].begin(), members[j].end());
        members[j].clear();
        members[j].shrink_to_fit();
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == i) continue;
            const double dik = d[i * n + k];
            const double djk = d[j * n + k];
            double merged;
            switch (linkage) {
                case Linkage::single: merged = std::min(dik, djk); break;
                case Linkage::complete: merged = std::max(dik, djk); break;
                case Linkage::average:
                default:
                    merged = (static_cast<double>(size[i]) * dik +
                              static_cast<double>(size[j]) * djk) /
                             static_cast<double>(size[i] + size[j]);
                    break;
            }
            d[i * n + k] = merged;
            d[k * n + i] = merged;
            const std::size_t lo = std::min(i, k);
            const std::size_t hi = std::max(i, k);
            heap.push({merged, static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)});
        }
        size[i] += size[j];
        --remaining;
    }

    std::vector<int> root(n, -1);
    for (std::size_t c = 0; c < n; ++c) {
        if (!active[c]) continue;
        for (std::uint32_t m : members[c]) root[m] = static_cast<int>(c);
    }
    std::vector<int> labels(n, -1);
    std::vector<int> cluster_label(n, -1);
    int next = 0;
    for (std::size_t e = 0; e < n; ++e) {
        int& assigned = cluster_label[static_cast<std::size_t>(root[e])];
        if (assigned < 0) assigned = next++;
        labels[e] = assigned;
    }
    return labels;
}

}  // namespace esdf
