#include "esdf/generator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "esdf/util.hpp"

namespace esdf {

namespace {

double sq_distance(const double* a, const double* b, std::size_t d) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace

Partition kmeans(const DataMatrix& data, std::size_t k, std::uint64_t seed,
                 std::size_t max_iters, double tol, std::vector<double>* wss_trace) {
    const std::size_t n = data.rows;
    const std::size_t d = data.cols;
    if (n == 0 || d == 0) throw std::invalid_argument("kmeans: empty data");
    if (k < 1) throw std::invalid_argument("kmeans: k must be at least 1");
    if (k > n) throw std::invalid_argument("kmeans: k exceeds number of points");
    if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be at least 1");
    if (tol < 0.0) throw std::invalid_argument("kmeans: tol must be non-negative");
    if (wss_trace) wss_trace->clear();

    Rng rng(seed);
    std::vector<double> centroids(k * d);
    {
        const std::vector<std::size_t> picks = rng.sample_without_replacement(n, k);
        for (std::size_t c = 0; c < k; ++c) {
            const double* src = data.row(picks[c]);
            std::copy(src, src + d, centroids.begin() + static_cast<std::ptrdiff_t>(c * d));
        }
    }

    std::vector<int> assign(n, 0);
    std::vector<std::size_t> counts(k, 0);
    std::vector<double> next(k * d);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // Assign each point to its nearest centroid; ties go to the lower index.
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = data.row(i);
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = sq_distance(x, centroids.data() + c * d, d);
                if (dist < best) {
                    best = dist;
                    best_c = static_cast<int>(c);
                }
            }
            assign[i] = best_c;
        }

        // Update centroids to cluster means.
        std::fill(next.begin(), next.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            ++counts[c];
            const double* x = data.row(i);
            double* acc = next.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) acc[j] += x[j];
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // repaired below
            double shift = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double mean = next[c * d + j] / static_cast<double>(counts[c]);
                const double diff = mean - centroids[c * d + j];
                shift += diff * diff;
                centroids[c * d + j] = mean;
            }
            movement = std::max(movement, std::sqrt(shift));
        }

        // Empty-cluster repair: seed each empty cluster with the point
        // farthest from its current centroid, taken from a cluster that can
        // spare it. The donated point then sits exactly on the new centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t farthest = n;
            double far_dist = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto owner = static_cast<std::size_t>(assign[i]);
                if (counts[owner] < 2) continue;
                const double dist = sq_distance(data.row(i), centroids.data() + owner * d, d);
                if (dist > far_dist) {
                    far_dist = dist;
                    farthest = i;
                }
            }
            if (farthest == n) throw std::logic_error("kmeans: empty-cluster repair failed");
            --counts[static_cast<std::size_t>(assign[farthest])];
            assign[farthest] = static_cast<int>(c);
            counts[c] = 1;
            const double* x = data.row(farthest);
            std::copy(x, x + d, centroids.begin() + static_cast<std::ptrdiff_t>(c * d));
            movement = std::numeric_limits<double>::infinity();
        }

        if (wss_trace) {
            double wss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                wss += sq_distance(data.row(i),
                                   centroids.data() + static_cast<std::size_t>(assign[i]) * d, d);
            }
            wss_trace->push_back(wss);
        }
        if (movement < tol) break;
    }
    return canonicalize(assign);
}

Ensemble generate_ensemble(const Dataset& dataset, const GeneratorConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("generator: runs must be at least 1");
    std::vector<Partition> members;
    members.reserve(cfg.runs);
    for (std::size_t i = 0; i < cfg.runs; ++i) {
        members.push_back(Partition(std::vector<int>{0}));  // placeholder, overwritten below
    }
    std::vector<std::string> failure(cfg.runs);
    parallel_for(0, cfg.runs, [&](std::size_t run) {
        try {
            members[run] = kmeans(dataset.points, cfg.k, split_seed(cfg.seed, run),
                                  cfg.max_iters, cfg.convergence_tol);
        } catch (const std::exception& e) {
            failure[run] = e.what();
        }
    });
    for (const std::string& msg : failure) {
        if (!msg.empty()) throw std::runtime_error("generate_ensemble: " + msg);
    }
    return Ensemble(std::move(members));
}

}  // namespace esdf
