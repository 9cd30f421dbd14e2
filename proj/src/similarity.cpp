#include "esdf/similarity.hpp"

#include <fstream>
#include <stdexcept>

#include "esdf/util.hpp"

namespace esdf {

namespace {

using int128 = __int128;

inline int128 choose2(std::size_t n) {
    return static_cast<int128>(n) * (static_cast<int128>(n) - 1) / 2;
}

}  // namespace

ContingencyTable contingency(const Partition& p, const Partition& q) {
    if (p.n_points() != q.n_points()) {
        throw std::invalid_argument("contingency: partitions have different sizes");
    }
    const std::size_t ki = p.n_clusters();
    const std::size_t kj = q.n_clusters();
    ContingencyTable table;
    table.n = p.n_points();
    table.counts.assign(ki, std::vector<std::size_t>(kj, 0));
    for (std::size_t a = 0; a < table.n; ++a) {
        ++table.counts[static_cast<std::size_t>(p.label(a))][static_cast<std::size_t>(q.label(a))];
    }
    table.row_sums.assign(ki, 0);
    table.col_sums.assign(kj, 0);
    for (std::size_t r = 0; r < ki; ++r) {
        for (std::size_t s = 0; s < kj; ++s) {
            table.row_sums[r] += table.counts[r][s];
            table.col_sums[s] += table.counts[r][s];
        }
    }
    return table;
}

double adjusted_rand(const Partition& p, const Partition& q) {
    if (p.n_points() != q.n_points()) {
        throw std::invalid_argument("adjusted_rand: partitions have different sizes");
    }
    if (p.n_points() < 2) {
        throw std::invalid_argument("undefined for fewer than 2 points");
    }
    const ContingencyTable table = contingency(p, q);

    int128 t0 = 0;
    for (const auto& row : table.counts) {
        for (std::size_t c : row) t0 += choose2(c);
    }
    int128 t1 = 0;
    for (std::size_t c : table.row_sums) t1 += choose2(c);
    int128 t2 = 0;
    for (std::size_t c : table.col_sums) t2 += choose2(c);
    const int128 pairs = choose2(table.n);

    // AR = (t0 - t1*t2/pairs) / ((t1 + t2)/2 - t1*t2/pairs), rescaled by
    // 2*pairs so both sides stay integral until the final division.
    const int128 numer = 2 * pairs * t0 - 2 * t1 * t2;
    const int128 denom = pairs * (t1 + t2) - 2 * t1 * t2;
    if (denom == 0) {
        if (numer == 0) return 1.0;
        throw std::domain_error("degenerate pair");
    }
    return static_cast<double>(numer) / static_cast<double>(denom);
}

SimilarityMatrix::SimilarityMatrix(std::size_t r, std::vector<double> values)
    : r_(r), values_(std::move(values)) {
    if (r_ == 0 || values_.size() != r_ * r_) {
        throw std::invalid_argument("similarity matrix has wrong shape");
    }
}

SimilarityMatrix pairwise_ari(const std::vector<Partition>& partitions) {
    const std::size_t r = partitions.size();
    if (r == 0) throw std::invalid_argument("pairwise_ari: no partitions");
    std::vector<double> values(r * r, 1.0);
    std::vector<std::string> failure(r);
    parallel_for(0, r, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < r; ++j) {
            double ari;
            try {
                ari = adjusted_rand(partitions[i], partitions[j]);
            } catch (const std::exception& ex) {
                if (failure[i].empty()) {
                    failure[i] = "pairwise_ari at pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + "): " + ex.what();
                }
                return;
            }
            values[i * r + j] = ari;
            values[j * r + i] = ari;
        }
    });
    for (const std::string& msg : failure) {
        if (!msg.empty()) throw std::domain_error(msg);
    }
    return SimilarityMatrix(r, std::move(values));
}

SimilarityMatrix pairwise_ari(const DistinctEnsemble& e) {
    return pairwise_ari(e.partitions());
}

WeightTable weights(const DistinctEnsemble& e, const SimilarityMatrix& s) {
    const std::size_t r = e.size();
    if (s.size() != r) {
        throw std::invalid_argument("weights: similarity matrix does not match ensemble");
    }
    WeightTable wt;
    wt.mar.resize(r);
    wt.diversity.resize(r);
    wt.weight.resize(r);
    const double total = static_cast<double>(e.total());
    if (r == 1) {
        // MAR is undefined for a single distinct partition; selection must
        // still return it, so diversity and weight are pinned to 1.
        wt.mar[0] = 0.0;
        wt.diversity[0] = 1.0;
        wt.weight[0] = 1.0;
        return wt;
    }
    for (std::size_t i = 0; i < r; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < r; ++j) {
            if (j != i) sum += s.at(i, j);
        }
        wt.mar[i] = sum / static_cast<double>(r - 1);
        wt.diversity[i] = 1.0 - wt.mar[i];
        wt.weight[i] = wt.diversity[i] * static_cast<double>(e.frequency(i)) / total;
    }
    return wt;
}

void write_similarity_csv(const std::string& path, const SimilarityMatrix& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "i,j,ari\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            out << i << ',' << j << ',' << format_double(s.at(i, j)) << '\n';
        }
    }
}

void write_weights_csv(const std::string& path, const DistinctEnsemble& e,
                       const WeightTable& wt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "i,frequency,mar,diversity,weight\n";
    for (std::size_t i = 0; i < e.size(); ++i) {
        out << i << ',' << e.frequency(i) << ',' << format_double(wt.mar[i]) << ','
            << format_double(wt.diversity[i]) << ',' << format_double(wt.weight[i]) << '\n';
    }
}

}  // namespace esdf
