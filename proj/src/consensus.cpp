#include "esdf/consensus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "esdf/util.hpp"

namespace esdf {

CoassociationMatrix::CoassociationMatrix(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
    if (n_ == 0 || values_.size() != n_ * n_) {
        throw std::invalid_argument("coassociation matrix has wrong shape");
    }
}

CoassociationMatrix coassociation(const std::vector<Partition>& subset) {
    if (subset.empty()) throw std::invalid_argument("empty subset");
    const std::size_t n = subset.front().n_points();
    for (const Partition& p : subset) {
        if (p.n_points() != n) throw std::invalid_argument("inconsistent ensemble");
    }
    const std::size_t m = subset.size();
    std::vector<double> values(n * n, 0.0);
    parallel_for(0, n, [&](std::size_t a) {
        values[a * n + a] = 1.0;
        for (std::size_t b = a + 1; b < n; ++b) {
            std::size_t together = 0;
            for (const Partition& p : subset) {
                if (p.label(a) == p.label(b)) ++together;
            }
            const double share = static_cast<double>(together) / static_cast<double>(m);
            values[a * n + b] = share;
            values[b * n + a] = share;
        }
    });
    return CoassociationMatrix(n, std::move(values));
}

void write_coassociation_csv(const std::string& path, const CoassociationMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t a = 0; a < m.size(); ++a) {
        for (std::size_t b = 0; b < m.size(); ++b) {
            if (b) out << ',';
            out << format_double(m.at(a, b));
        }
        out << '\n';
    }
}

Hypergraph build_hypergraph(const std::vector<Partition>& subset) {
    if (subset.empty()) throw std::invalid_argument("empty subset");
    const std::size_t n = subset.front().n_points();
    Hypergraph hg;
    hg.n_vertices = n;
    for (const Partition& p : subset) {
        if (p.n_points() != n) throw std::invalid_argument("inconsistent ensemble");
        auto groups = p.clusters();
        for (auto& group : groups) {
            std::vector<std::uint32_t> edge(group.begin(), group.end());
            hg.hyperedges.push_back(std::move(edge));
            hg.edge_weights.push_back(1.0);
        }
    }
    return hg;
}

ConsensusMethod parse_consensus_method(const std::string& name) {
    if (name == "cspa") return ConsensusMethod::cspa;
    if (name == "hgpa") return ConsensusMethod::hgpa;
    throw std::invalid_argument("unknown consensus method: " + name + " (expected cspa|hgpa)");
}

std::string consensus_method_name(ConsensusMethod m) {
    return m == ConsensusMethod::cspa ? "cspa" : "hgpa";
}

Partition cspa(const std::vector<Partition>& subset, const ConsensusConfig& cfg) {
    if (subset.empty()) throw std::invalid_argument("empty subset");
    const std::size_t n = subset.front().n_points();
    if (cfg.target_k < 1) throw std::invalid_argument("target_k must be at least 1");
    if (cfg.target_k > n) {
        throw std::invalid_argument("target_k exceeds number of data points");
    }
    const CoassociationMatrix co = coassociation(subset);
    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n * n; ++i) dist[i] = 1.0 - co.values()[i];
    std::vector<int> labels = agglomerate(dist, n, cfg.target_k, cfg.linkage);
    return canonicalize(labels);
}

double hypergraph_cut(const Hypergraph& hg, const std::vector<int>& side) {
    double cut = 0.0;
    for (std::size_t e = 0; e < hg.hyperedges.size(); ++e) {
        const auto& edge = hg.hyperedges[e];
        bool spans = false;
        for (std::size_t v = 1; v < edge.size(); ++v) {
            if (side[edge[v]] != side[edge[0]]) {
                spans = true;
                break;
            }
        }
        if (spans) cut += hg.edge_weights[e];
    }
    return cut;
}

namespace {

// One level of recursive bisection: a subset of vertices, the hyperedge
// restrictions with at least two vertices inside, and the incidence lists.
struct BisectionProblem {
    std::vector<std::vector<std::uint32_t>> edges;  // local vertex ids
    std::vector<double> edge_weights;
    std::vector<std::vector<std::uint32_t>> vertex_edges;
    std::size_t n = 0;
};

struct FmOutcome {
    std::vector<std::uint8_t> side;  // 0 = A, 1 = B
    double cut = std::numeric_limits<double>::infinity();
};

double move_gain(const BisectionProblem& prob, const std::vector<std::uint8_t>& side,
                 const std::vector<std::array<std::uint32_t, 2>>& counts, std::uint32_t v) {
    double gain = 0.0;
    const std::uint8_t from = side[v];
    for (std::uint32_t e : prob.vertex_edges[v]) {
        const std::size_t sz = prob.edges[e].size();
        if (sz < 2) continue;
        const std::uint32_t in_from = counts[e][from];
        if (in_from == sz) {
            gain -= prob.edge_weights[e];  // uncut edge becomes cut
        } else if (in_from == 1) {
            gain += prob.edge_weights[e];  // v is the last holdout, edge heals
        }
    }
    return gain;
}

// Classic FM pass: tentatively move every eligible vertex once in best-gain
// order, then keep the prefix with the lowest cut. Repeats until a pass no
// longer improves.
FmOutcome fm_refine(const BisectionProblem& prob, std::vector<std::uint8_t> side,
                    std::size_t lo_a, std::size_t hi_a) {
    const std::size_t n = prob.n;
    std::vector<std::array<std::uint32_t, 2>> counts(prob.edges.size(), {0, 0});
    auto recount = [&] {
        for (std::size_t e = 0; e < prob.edges.size(); ++e) {
            counts[e] = {0, 0};
            for (std::uint32_t v : prob.edges[e]) ++counts[e][side[v]];
        }
    };
    auto current_cut = [&] {
        double cut = 0.0;
        for (std::size_t e = 0; e < prob.edges.size(); ++e) {
            if (counts[e][0] > 0 && counts[e][1] > 0) cut += prob.edge_weights[e];
        }
        return cut;
    };

    recount();
    double cut = current_cut();
    const std::size_t max_passes = 64;

    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        std::vector<std::uint8_t> pass_start = side;
        const double start_cut = cut;
        std::size_t size_a = 0;
        for (std::uint8_t s : side) size_a += (s == 0);

        std::vector<double> gain(n);
        for (std::uint32_t v = 0; v < n; ++v) gain[v] = move_gain(prob, side, counts, v);
        std::vector<std::uint8_t> locked(n, 0);

        double running = cut;
        double best_cut = cut;
        std::size_t best_prefix = 0;
        std::vector<std::uint32_t> moves;
        moves.reserve(n);

        for (;;) {
            bool found = false;
            std::uint32_t pick = 0;
            for (std::uint32_t v = 0; v < n; ++v) {
                if (locked[v]) continue;
                const bool from_a = side[v] == 0;
                if (from_a ? size_a <= lo_a : size_a >= hi_a) continue;
                if (!found || gain[v] > gain[pick]) {
                    pick = v;
                    found = true;
                }
            }
            if (!found) break;
            const std::uint32_t v = pick;
            const std::uint8_t from = side[v];
            running -= gain[v];
            side[v] = from ^ 1;
            if (from == 0) --size_a; else ++size_a;
            locked[v] = 1;
            for (std::uint32_t e : prob.vertex_edges[v]) {
                --counts[e][from];
                ++counts[e][side[v]];
            }
            // Gains of neighbors sharing an edge with v may have changed.
            for (std::uint32_t e : prob.vertex_edges[v]) {
                for (std::uint32_t u : prob.edges[e]) {
                    if (!locked[u]) gain[u] = move_gain(prob, side, counts, u);
                }
            }
            moves.push_back(v);
            if (running < best_cut) {
                best_cut = running;
                best_prefix = moves.size();
            }
        }

        // Roll back to the best prefix of the move sequence.
        side = std::move(pass_start);
        for (std::size_t i = 0; i < best_prefix; ++i) side[moves[i]] ^= 1;
        recount();
        cut = current_cut();
        if (!(cut < start_cut)) break;
    }
    return FmOutcome{std::move(side), cut};
}

std::vector<std::uint8_t> bisect(const BisectionProblem& prob, std::size_t lo_a,
                                 std::size_t hi_a, std::size_t init_a, std::size_t restarts,
                                 std::uint64_t seed) {
    const std::size_t n = prob.n;
    std::vector<FmOutcome> outcomes(restarts);
    parallel_for(0, restarts, [&](std::size_t t) {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        if (t > 0) {
            Rng rng(split_seed(seed, t));
            rng.shuffle(order);
        }
        std::vector<std::uint8_t> side(n, 1);
        for (std::size_t i = 0; i < init_a; ++i) side[order[i]] = 0;
        outcomes[t] = fm_refine(prob, std::move(side), lo_a, hi_a);
    });
    std::size_t best = 0;
    for (std::size_t t = 1; t < restarts; ++t) {
        if (outcomes[t].cut < outcomes[best].cut) best = t;
    }
    return std::move(outcomes[best].side);
}

struct RecursiveBisector {
    const Hypergraph& hg;
    const ConsensusConfig& cfg;
    std::size_t part_lo;  // min final part size
    std::size_t part_hi;  // max final part size
    std::vector<int> assignment;

    RecursiveBisector(const Hypergraph& graph, const ConsensusConfig& config,
                      std::size_t lo, std::size_t hi)
        : hg(graph), cfg(config), part_lo(lo), part_hi(hi),
          assignment(graph.n_vertices, 0) {}

    void split(std::vector<std::uint32_t> verts, std::size_t parts, int base_label,
               std::uint64_t seed) {
        if (parts == 1) {
            for (std::uint32_t v : verts) assignment[v] = base_label;
            return;
        }
        const std::size_t s = verts.size();
        const std::size_t parts_a = parts / 2;
        const std::size_t parts_b = parts - parts_a;

        std::size_t lo_a = std::max(parts_a * part_lo,
                                    s > parts_b * part_hi ? s - parts_b * part_hi : std::size_t(0));
        std::size_t hi_a = std::min(parts_a * part_hi, s - parts_b * part_lo);
        std::size_t init_a = (s * parts_a + parts / 2) / parts;
        init_a = std::clamp(init_a, lo_a, hi_a);

        BisectionProblem prob;
        prob.n = s;
        std::vector<std::int64_t> local(hg.n_vertices, -1);
        for (std::size_t i = 0; i < s; ++i) local[verts[i]] = static_cast<std::int64_t>(i);
        prob.vertex_edges.resize(s);
        for (std::size_t e = 0; e < hg.hyperedges.size(); ++e) {
            std::vector<std::uint32_t> restricted;
            for (std::uint32_t v : hg.hyperedges[e]) {
                if (local[v] >= 0) restricted.push_back(static_cast<std::uint32_t>(local[v]));
            }
            if (restricted.size() < 2) continue;
            const auto edge_id = static_cast<std::uint32_t>(prob.edges.size());
            for (std::uint32_t v : restricted) prob.vertex_edges[v].push_back(edge_id);
            prob.edges.push_back(std::move(restricted));
            prob.edge_weights.push_back(hg.edge_weights[e]);
        }

        const std::vector<std::uint8_t> side =
            bisect(prob, lo_a, hi_a, init_a, std::max<std::size_t>(cfg.restarts, 1), seed);

        std::vector<std::uint32_t> verts_a;
        std::vector<std::uint32_t> verts_b;
        for (std::size_t i = 0; i < s; ++i) {
            (side[i] == 0 ? verts_a : verts_b).push_back(verts[i]);
        }
        split(std::move(verts_a), parts_a, base_label, split_seed(seed, 1));
        split(std::move(verts_b), parts_b, base_label + static_cast<int>(parts_a),
              split_seed(seed, 2));
    }
};

}  // namespace

Partition partition_hypergraph(const Hypergraph& hg, const ConsensusConfig& cfg) {
    const std::size_t n = hg.n_vertices;
    const std::size_t k = cfg.target_k;
    if (n == 0) throw std::invalid_argument("hypergraph has no vertices");
    if (hg.hyperedges.size() != hg.edge_weights.size()) {
        throw std::invalid_argument("hypergraph edge weights do not match hyperedges");
    }
    for (const auto& edge : hg.hyperedges) {
        if (edge.empty()) throw std::invalid_argument("hypergraph contains an empty hyperedge");
        for (std::uint32_t v : edge) {
            if (v >= n) throw std::invalid_argument("hyperedge vertex out of range");
        }
    }
    if (k < 1) throw std::invalid_argument("target_k must be at least 1");
    if (k > n) throw std::invalid_argument("target_k exceeds number of data points");
    if (cfg.balance_tolerance < 0.0 || cfg.balance_tolerance >= 1.0) {
        throw std::invalid_argument("balance_tolerance must be in [0, 1)");
    }

    const double ideal = static_cast<double>(n) / static_cast<double>(k);
    const auto lower = static_cast<std::size_t>(std::floor((1.0 - cfg.balance_tolerance) * ideal));
    const auto upper = static_cast<std::size_t>(std::ceil((1.0 + cfg.balance_tolerance) * ideal));
    if (k * lower > n) throw std::invalid_argument("infeasible balance");
    // Parts must be non-empty even when the rounded lower bound is zero.
    const std::size_t part_lo = std::max<std::size_t>(lower, 1);

    RecursiveBisector bisector(hg, cfg, part_lo, upper);
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    bisector.split(std::move(all), k, 0, mix64(cfg.seed));
    return canonicalize(bisector.assignment);
}

Partition hgpa(const std::vector<Partition>& subset, const ConsensusConfig& cfg) {
    if (subset.empty()) throw std::invalid_argument("empty subset");
    return partition_hypergraph(build_hypergraph(subset), cfg);
}

Partition consensus(const std::vector<Partition>& subset, const ConsensusConfig& cfg) {
    return cfg.method == ConsensusMethod::cspa ? cspa(subset, cfg) : hgpa(subset, cfg);
}

}  // namespace esdf
