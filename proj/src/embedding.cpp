#include "esdf/embedding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "esdf/util.hpp"

namespace esdf {

std::vector<double> partition_distance_matrix(const SimilarityMatrix& s) {
    const std::size_t r = s.size();
    std::vector<double> d(r * r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            d[i * r + j] = i == j ? 0.0 : 1.0 - s.at(i, j);
        }
    }
    return d;
}

namespace {

std::vector<std::size_t> nearest_neighbors(const std::vector<double>& dist, std::size_t r,
                                           std::size_t i, std::size_t k) {
    std::vector<std::size_t> order;
    order.reserve(r - 1);
    for (std::size_t j = 0; j < r; ++j) {
        if (j != i) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dist[i * r + a] < dist[i * r + b];
    });
    order.resize(k);
    return order;
}

// Union-find over the symmetrized k-NN graph.
struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

void fix_column_signs(std::vector<double>& coords, std::size_t rows, std::size_t dims,
                      const std::vector<std::size_t>& row_ids) {
    for (std::size_t c = 0; c < dims; ++c) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < rows; ++i) {
            const double mag = std::abs(coords[row_ids[i] * dims + c]);
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (coords[row_ids[arg] * dims + c] < 0.0) {
            for (std::size_t i = 0; i < rows; ++i) coords[row_ids[i] * dims + c] *= -1.0;
        }
    }
}

// Embed one connected component; writes into the rows of `out` named by ids.
void lle_component(const std::vector<double>& dist, std::size_t r,
                   const std::vector<std::size_t>& ids, const EmbeddingConfig& cfg,
                   Embedding& out) {
    const std::size_t m = ids.size();
    const std::size_t k = std::min(cfg.n_neighbors, m - 1);
    const std::size_t dims_here = std::min(cfg.target_dim, m - 1);

    Eigen::MatrixXd w_matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                     static_cast<Eigen::Index>(m));
    std::vector<std::size_t> local_of(r, r);
    for (std::size_t a = 0; a < m; ++a) local_of[ids[a]] = a;

    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t i = ids[a];
        std::vector<std::size_t> neigh;
        {
            // Neighbors restricted to the component (it is closed under the
            // global k-NN relation, so this matches the global neighbor set).
            std::vector<std::size_t> order;
            for (std::size_t b = 0; b < m; ++b) {
                if (ids[b] != i) order.push_back(ids[b]);
            }
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return dist[i * r + x] < dist[i * r + y];
            });
            order.resize(k);
            neigh = std::move(order);
        }

        // Local Gram recovered from squared distances, anchored at i:
        // G[a][b] = (d(i,a)^2 + d(i,b)^2 - d(a,b)^2) / 2.
        Eigen::MatrixXd gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for (std::size_t a2 = 0; a2 < k; ++a2) {
            for (std::size_t b2 = 0; b2 < k; ++b2) {
                const double dia = dist[i * r + neigh[a2]];
                const double dib = dist[i * r + neigh[b2]];
                const double dab = dist[neigh[a2] * r + neigh[b2]];
                gram(static_cast<Eigen::Index>(a2), static_cast<Eigen::Index>(b2)) =
                    0.5 * (dia * dia + dib * dib - dab * dab);
            }
        }
        const double trace = gram.trace();
        const double ridge =
            cfg.regularization * (trace > 0.0 ? trace / static_cast<double>(k) : 1.0);
        gram.diagonal().array() += ridge;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible()) {
            throw std::runtime_error("lle: singular local Gram matrix at point " +
                                     std::to_string(i));
        }
        Eigen::VectorXd w = lu.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(k)));
        const double total = w.sum();
        if (total == 0.0 || !std::isfinite(total)) {
            throw std::runtime_error("lle: singular local Gram matrix at point " +
                                     std::to_string(i));
        }
        w /= total;

        out.neighbor_lists[i] = neigh;
        out.reconstruction_weights[i].assign(w.data(), w.data() + k);
        for (std::size_t b = 0; b < k; ++b) {
            w_matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(local_of[neigh[b]])) =
                w(static_cast<Eigen::Index>(b));
        }
    }

    Eigen::MatrixXd iw = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                   static_cast<Eigen::Index>(m)) -
                         w_matrix;
    Eigen::MatrixXd cost = iw.transpose() * iw;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cost);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("lle: eigen decomposition failed");
    }

    // Skip the constant eigenvector (smallest eigenvalue ~ 0); keep the next
    // dims_here eigenvectors as coordinates. Eigenvectors in a near-null
    // space can pick up a small component along the constant direction, so
    // each column is explicitly re-centered (the ones vector lies in the
    // null space of the exact cost matrix, so residuals are unaffected).
    for (std::size_t c = 0; c < dims_here; ++c) {
        const auto col = static_cast<Eigen::Index>(c + 1);
        double mean = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            mean += solver.eigenvectors()(static_cast<Eigen::Index>(a), col);
        }
        mean /= static_cast<double>(m);
        for (std::size_t a = 0; a < m; ++a) {
            out.coordinates[ids[a] * cfg.target_dim + c] =
                solver.eigenvectors()(static_cast<Eigen::Index>(a), col) - mean;
        }
        out.eigenvalues.push_back(solver.eigenvalues()(col));
    }
    fix_column_signs(out.coordinates, m, cfg.target_dim, ids);
}

}  // namespace

Embedding lle(const std::vector<double>& distances, std::size_t r, const EmbeddingConfig& cfg) {
    if (r == 0 || distances.size() != r * r) {
        throw std::invalid_argument("lle: distance matrix has wrong shape");
    }
    if (cfg.n_neighbors < 1 || cfg.n_neighbors >= r) {
        throw std::invalid_argument(
            "lle: n_neighbors must satisfy 1 <= n_neighbors < r (r = " + std::to_string(r) +
            ", n_neighbors = " + std::to_string(cfg.n_neighbors) +
            "); pass a smaller n_neighbors");
    }
    if (cfg.target_dim < 1 || cfg.target_dim >= r) {
        throw std::invalid_argument("lle: target_dim must satisfy 1 <= target_dim < r");
    }
    if (cfg.regularization <= 0.0) {
        throw std::invalid_argument("lle: regularization must be positive");
    }

    // Component structure of the symmetrized neighbor graph.
    DisjointSets sets(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j : nearest_neighbors(distances, r, i, cfg.n_neighbors)) {
            sets.unite(i, j);
        }
    }
    std::vector<std::vector<std::size_t>> components;
    {
        std::vector<std::size_t> component_of(r, r);
        for (std::size_t i = 0; i < r; ++i) {
            const std::size_t root = sets.find(i);
            if (component_of[root] == r) {
                component_of[root] = components.size();
                components.emplace_back();
            }
            components[component_of[root]].push_back(i);
        }
    }
    if (components.size() > 1) {
        std::cerr << "warning: neighborhood graph has " << components.size()
                  << " connected components; embedding each separately\n";
    }

    Embedding out;
    out.rows = r;
    out.dims = cfg.target_dim;
    out.coordinates.assign(r * cfg.target_dim, 0.0);
    out.neighbor_lists.resize(r);
    out.reconstruction_weights.resize(r);

    for (const auto& ids : components) {
        if (ids.size() < 2) {
            // An isolated object carries no geometry; its row stays at 0.
            out.neighbor_lists[ids[0]] = {};
            out.reconstruction_weights[ids[0]] = {};
            continue;
        }
        lle_component(distances, r, ids, cfg, out);
    }
    return out;
}

std::string point_role_name(PointRole role) {
    switch (role) {
        case PointRole::distinct: return "distinct";
        case PointRole::esdf_selected: return "esdf-selected";
        case PointRole::cas_selected: return "cas-selected";
        case PointRole::both: return "both";
        case PointRole::ground_truth: return "ground-truth";
        case PointRole::consensus_full: return "consensus-full";
        case PointRole::consensus_cas: return "consensus-cas";
        case PointRole::consensus_esdf: return "consensus-esdf";
    }
    return "distinct";
}

namespace {

struct Marker {
    const char* fill;
    const char* stroke;
    double radius;
};

Marker marker_for(PointRole role) {
    switch (role) {
        case PointRole::distinct: return {"#2ca02c", "none", 3.0};
        case PointRole::esdf_selected: return {"none", "#d62728", 5.0};
        case PointRole::cas_selected: return {"none", "#ff7f0e", 5.0};
        case PointRole::both: return {"#17becf", "#d62728", 5.0};
        case PointRole::ground_truth: return {"#000000", "none", 6.0};
        case PointRole::consensus_full: return {"#e377c2", "none", 6.0};
        case PointRole::consensus_cas: return {"#7f7f7f", "#000000", 6.0};
        case PointRole::consensus_esdf: return {"#1f77b4", "none", 6.0};
    }
    return {"#2ca02c", "none", 3.0};
}

}  // namespace

void emit_scatter(const Embedding& embedding, std::pair<std::size_t, std::size_t> dims,
                  const ScatterAnnotations& annotations, const std::string& svg_path,
                  const std::string& csv_path) {
    if (dims.first >= embedding.dims || dims.second >= embedding.dims) {
        throw std::invalid_argument("emit_scatter: axis index exceeds embedding dimension");
    }
    const std::size_t r = embedding.rows;
    std::vector<PointRole> roles(r, PointRole::distinct);
    for (std::size_t i : annotations.esdf_selected) roles.at(i) = PointRole::esdf_selected;
    for (std::size_t i : annotations.cas_selected) {
        roles.at(i) = roles[i] == PointRole::esdf_selected ? PointRole::both
                                                           : PointRole::cas_selected;
    }
    if (annotations.ground_truth) roles.at(*annotations.ground_truth) = PointRole::ground_truth;
    if (annotations.consensus_full) {
        roles.at(*annotations.consensus_full) = PointRole::consensus_full;
    }
    if (annotations.consensus_cas) roles.at(*annotations.consensus_cas) = PointRole::consensus_cas;
    if (annotations.consensus_esdf) {
        roles.at(*annotations.consensus_esdf) = PointRole::consensus_esdf;
    }

    {
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot write " + csv_path);
        csv << "index,x,y,role\n";
        for (std::size_t i = 0; i < r; ++i) {
            csv << i << ',' << format_double(embedding.coord(i, dims.first)) << ','
                << format_double(embedding.coord(i, dims.second)) << ','
                << point_role_name(roles[i]) << '\n';
        }
    }

    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        const double x = embedding.coord(i, dims.first);
        const double y = embedding.coord(i, dims.second);
        if (i == 0 || x < min_x) min_x = x;
        if (i == 0 || x > max_x) max_x = x;
        if (i == 0 || y < min_y) min_y = y;
        if (i == 0 || y > max_y) max_y = y;
    }
    const double span_x = max_x > min_x ? max_x - min_x : 1.0;
    const double span_y = max_y > min_y ? max_y - min_y : 1.0;
    const double width = 720.0, height = 540.0, pad = 40.0;
    auto sx = [&](double x) { return pad + (x - min_x) / span_x * (width - 2 * pad); };
    auto sy = [&](double y) { return height - pad - (y - min_y) / span_y * (height - 2 * pad); };

    std::ofstream svg(svg_path);
    if (!svg) throw std::runtime_error("cannot write " + svg_path);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Draw plain points first so highlighted markers stay visible.
    for (int layer = 0; layer < 2; ++layer) {
        for (std::size_t i = 0; i < r; ++i) {
            const bool plain = roles[i] == PointRole::distinct;
            if ((layer == 0) != plain) continue;
            const Marker m = marker_for(roles[i]);
            svg << "<circle cx=\"" << sx(embedding.coord(i, dims.first)) << "\" cy=\""
                << sy(embedding.coord(i, dims.second)) << "\" r=\"" << m.radius << "\" fill=\""
                << m.fill << "\" stroke=\"" << m.stroke << "\" stroke-width=\"1.5\">"
                << "<title>" << i << ": " << point_role_name(roles[i]) << "</title></circle>\n";
        }
    }
    // Legend.
    const PointRole legend_roles[] = {
        PointRole::distinct,       PointRole::esdf_selected,  PointRole::cas_selected,
        PointRole::both,           PointRole::ground_truth,   PointRole::consensus_full,
        PointRole::consensus_cas,  PointRole::consensus_esdf,
    };
    double ly = pad / 2.0;
    for (PointRole role : legend_roles) {
        const Marker m = marker_for(role);
        svg << "<circle cx=\"" << width - 150.0 << "\" cy=\"" << ly << "\" r=\"" << m.radius
            << "\" fill=\"" << m.fill << "\" stroke=\"" << m.stroke
            << "\" stroke-width=\"1.5\"/>"
            << "<text x=\"" << width - 140.0 << "\" y=\"" << ly + 4.0
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << point_role_name(role)
            << "</text>\n";
        ly += 16.0;
    }
    svg << "</svg>\n";
}

}  // namespace esdf
