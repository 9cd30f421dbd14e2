#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include "esdf/selection.hpp"
#include "esdf/util.hpp"
#include "oracles.hpp"

using namespace esdf;

namespace {

// Ensemble whose distinct partitions carry the given frequencies, built by
// repeating hand-picked distinct groupings of 6 points.
Ensemble with_frequencies(const std::vector<std::size_t>& freqs) {
    const std::vector<Partition> pool = {
        Partition({0, 0, 0, 1, 1, 1}), Partition({0, 1, 0, 1, 0, 1}),
        Partition({0, 0, 1, 1, 2, 2}), Partition({0, 1, 1, 1, 1, 1}),
        Partition({0, 0, 0, 0, 1, 1}),
    };
    std::vector<Partition> members;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        for (std::size_t c = 0; c < freqs[i]; ++c) members.push_back(pool.at(i));
    }
    return Ensemble(members);
}

}  // namespace

TEST_CASE("rank_partitions sorts descending with stable ties") {
    const Ensemble e = with_frequencies({1, 4, 2});
    const DistinctEnsemble de = deduplicate(e);
    WeightTable wt = weights(de, pairwise_ari(de));

    wt.weight = {0.2, 0.5, 0.1};
    CHECK(rank_partitions(de, wt, Criterion::weight) == std::vector<std::size_t>{1, 0, 2});

    wt.weight = {0.3, 0.3, 0.3};
    CHECK(rank_partitions(de, wt, Criterion::weight) == std::vector<std::size_t>{0, 1, 2});

    CHECK(rank_partitions(de, wt, Criterion::frequency) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("weight ranking collapses to diversity or frequency in the degenerate directions") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Partition> members;
        for (int i = 0; i < 12; ++i) {
            members.push_back(Partition(oracles::random_labels(rng, 10, 3)));
        }
        const DistinctEnsemble de = deduplicate(Ensemble(members));
        const WeightTable wt = weights(de, pairwise_ari(de));
        if (de.size() < 2) continue;

        // Equal frequencies: synthesize by expanding each distinct partition once.
        const DistinctEnsemble equal_freq = deduplicate(Ensemble(de.partitions()));
        const WeightTable wt_eq = weights(equal_freq, pairwise_ari(equal_freq));
        CHECK(rank_partitions(equal_freq, wt_eq, Criterion::weight) ==
              rank_partitions(equal_freq, wt_eq, Criterion::diversity));

        // Equal diversities: force them and compare to the frequency ranking.
        WeightTable forced = wt;
        const double total = static_cast<double>(de.total());
        for (std::size_t i = 0; i < de.size(); ++i) {
            forced.diversity[i] = 0.5;
            forced.weight[i] = 0.5 * static_cast<double>(de.frequency(i)) / total;
        }
        CHECK(rank_partitions(de, forced, Criterion::weight) ==
              rank_partitions(de, forced, Criterion::frequency));
    }
}

TEST_CASE("frequency scaling leaves the weight order unchanged") {
    const std::vector<std::size_t> base = {1, 4, 2, 7, 3};
    const DistinctEnsemble de1 = deduplicate(with_frequencies(base));
    std::vector<std::size_t> scaled = base;
    for (auto& f : scaled) f *= 5;
    const DistinctEnsemble de5 = deduplicate(with_frequencies(scaled));
    const WeightTable wt1 = weights(de1, pairwise_ari(de1));
    const WeightTable wt5 = weights(de5, pairwise_ari(de5));
    CHECK(rank_partitions(de1, wt1, Criterion::weight) ==
          rank_partitions(de5, wt5, Criterion::weight));
}

TEST_CASE("esdf_select on a uniform ensemble returns the sole partition") {
    const Partition p({0, 0, 1, 1, 2, 2});
    for (std::size_t t : {std::size_t(1), std::size_t(5), std::size_t(200)}) {
        const Ensemble e(std::vector<Partition>(t, p));
        const SelectionResult sel = esdf_select(e, 4);
        CHECK(sel.selected_indices == std::vector<std::size_t>{0});
        CHECK(sel.criterion == Criterion::weight);
    }
}

TEST_CASE("esdf_select caps k at the distinct count and keeps prefix property") {
    const Ensemble e = with_frequencies({3, 1, 2, 5, 4});
    const SelectionResult all = esdf_select(e, 50);
    CHECK(all.selected_indices.size() == 5);

    const SelectionResult two = esdf_select(e, 2);
    const SelectionResult four = esdf_select(e, 4);
    for (std::size_t i : two.selected_indices) {
        CHECK(std::find(four.selected_indices.begin(), four.selected_indices.end(), i) !=
              four.selected_indices.end());
    }
    CHECK(std::vector<std::size_t>(four.selected_indices.begin(),
                                   four.selected_indices.begin() + 2) == two.selected_indices);
}

TEST_CASE("esdf_select ignores duplicate order within the ensemble") {
    const Partition p({0, 0, 0, 1, 1, 1});
    const Partition q({0, 1, 0, 1, 0, 1});
    const Partition s({0, 0, 1, 1, 2, 2});
    const Ensemble a({p, q, p, s, p, q});
    const Ensemble b({p, p, q, s, q, p});  // same first-appearance order
    CHECK(esdf_select(a, 2).selected_indices == esdf_select(b, 2).selected_indices);
}

TEST_CASE("cas_select groups and keeps one representative per group") {
    // Two tight families of partitions of 24 points: perturbations of a
    // 2-cluster split and of an interleaved split. Intra-family ARI is high,
    // cross-family ARI is near zero.
    std::vector<int> base_a(24), base_b(24);
    for (int i = 0; i < 24; ++i) {
        base_a[i] = i < 12 ? 0 : 1;
        base_b[i] = i % 2;
    }
    auto perturb = [](std::vector<int> labels, std::size_t at) {
        labels[at] = 1 - labels[at];
        return canonicalize(labels);
    };
    std::vector<Partition> members = {
        canonicalize(base_a), perturb(base_a, 0),  perturb(base_a, 5),
        canonicalize(base_b), perturb(base_b, 20), perturb(base_b, 9),
    };
    const DistinctEnsemble de = deduplicate(Ensemble(members));
    REQUIRE(de.size() == 6);
    const SimilarityMatrix sim = pairwise_ari(de);

    const SelectionResult sel = cas_select(de, sim, 2);
    REQUIRE(sel.selected_indices.size() == 2);
    const bool one_per_family =
        (sel.selected_indices[0] < 3) != (sel.selected_indices[1] < 3);
    CHECK(one_per_family);

    // k == r: everything selected, each its own group.
    const SelectionResult all = cas_select(de, sim, 6);
    std::vector<std::size_t> sorted = all.selected_indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

    // k == 1: the representative maximizes MAR.
    const WeightTable wt = weights(de, sim);
    const SelectionResult top = cas_select(de, sim, 1);
    REQUIRE(top.selected_indices.size() == 1);
    const std::size_t argmax =
        std::max_element(wt.mar.begin(), wt.mar.end()) - wt.mar.begin();
    CHECK(top.selected_indices[0] == argmax);
}

TEST_CASE("selection csv lists rank, index and scores") {
    namespace fs = std::filesystem;
    const Ensemble e = with_frequencies({2, 3, 1});
    const DistinctEnsemble de = deduplicate(e);
    const SimilarityMatrix sim = pairwise_ari(de);
    const WeightTable wt = weights(de, sim);
    const SelectionResult sel = select_top_k(de, wt, Criterion::weight, 2);

    const fs::path dir = fs::temp_directory_path() / "esdf-selection-csv";
    fs::create_directories(dir);
    write_selection_csv((dir / "sel.csv").string(), sel, de, wt);
    std::ifstream in(dir / "sel.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "rank,partition_index,frequency,mar,diversity,weight");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 2);
    fs::remove_all(dir);
}
