#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "esdf/dataset.hpp"
#include "esdf/generator.hpp"
#include "esdf/util.hpp"

using namespace esdf;

namespace {

namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "esdf-loader-tests";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

/// Two well-separated 2-D blobs around (0,0) and (100,100).
DataMatrix two_blobs(std::size_t per_blob, std::uint64_t seed) {
    Rng rng(seed);
    DataMatrix m;
    m.rows = per_blob * 2;
    m.cols = 2;
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double center = i < per_blob ? 0.0 : 100.0;
        m.values.push_back(center + rng.uniform());
        m.values.push_back(center + rng.uniform());
    }
    return m;
}

}  // namespace

#ifdef ESDF_DATA_DIR
TEST_CASE("iris loads with 150 rows, 4 features, 3 classes") {
    const Dataset iris = load_dataset(std::string(ESDF_DATA_DIR) + "/iris.csv");
    CHECK(iris.n() == 150);
    CHECK(iris.d() == 4);
    REQUIRE(iris.true_labels.has_value());
    CHECK(iris.true_labels->n_clusters() == 3);
    CHECK(iris.true_labels->n_points() == 150);
    CHECK(iris.name == "iris");
}
#endif

TEST_CASE("loader handles label specs, drops and errors") {
    const fs::path csv = write_temp("tiny.csv", "1.0,2.0,x\n3.0,4.0,x\n");
    const Dataset ds = load_dataset(csv.string());
    CHECK(ds.n() == 2);
    CHECK(ds.d() == 2);
    CHECK(ds.true_labels->labels() == std::vector<int>{0, 0});

    LoadOptions first;
    first.label_column = "first";
    const fs::path csv2 = write_temp("first.csv", "a,1.0\nb,2.0\na,3.0\n");
    const Dataset ds2 = load_dataset(csv2.string(), first);
    CHECK(ds2.true_labels->labels() == std::vector<int>{0, 1, 0});

    LoadOptions named;
    named.label_column = "name:class";
    const fs::path csv3 = write_temp("named.csv", "f1,class,f2\n1.0,yes,2\n2.0,no,3\n");
    const Dataset ds3 = load_dataset(csv3.string(), named);
    CHECK(ds3.d() == 2);
    CHECK(ds3.true_labels->n_clusters() == 2);

    LoadOptions dropped;
    dropped.drop_columns = {0};  // leading id column
    const fs::path csv4 = write_temp("ids.csv", "id1,1.0,a\nid2,2.0,b\n");
    const Dataset ds4 = load_dataset(csv4.string(), dropped);
    CHECK(ds4.d() == 1);

    LoadOptions unlabeled;
    unlabeled.label_column = "none";
    const fs::path space = write_temp("plain.txt", "# comment\n1 2\n3 4\n5 6\n");
    const Dataset ds5 = load_dataset(space.string(), unlabeled);
    CHECK(ds5.n() == 3);
    CHECK(ds5.d() == 2);
    CHECK_FALSE(ds5.true_labels.has_value());

    CHECK_THROWS(load_dataset("/nonexistent/file.csv"));
    const fs::path ragged = write_temp("ragged.csv", "1,2,a\n1,b\n");
    CHECK_THROWS_WITH_AS(load_dataset(ragged.string()),
                         doctest::Contains("row 2"), std::runtime_error);
    const fs::path alpha = write_temp("alpha.csv", "1,2,a\n1,oops,b\n");
    CHECK_THROWS_WITH_AS(load_dataset(alpha.string()),
                         doctest::Contains("non-numeric"), std::runtime_error);
}

TEST_CASE("standardize z-scores each feature") {
    DataMatrix m;
    m.rows = 4;
    m.cols = 2;
    m.values = {1, 10, 2, 20, 3, 30, 4, 40};
    standardize(m);
    for (std::size_t c = 0; c < 2; ++c) {
        double mean = 0, var = 0;
        for (std::size_t r = 0; r < 4; ++r) mean += m.at(r, c);
        mean /= 4;
        for (std::size_t r = 0; r < 4; ++r) var += (m.at(r, c) - mean) * (m.at(r, c) - mean);
        CHECK(std::abs(mean) < 1e-12);
        CHECK(var / 4 == doctest::Approx(1.0));
    }
}

TEST_CASE("kmeans recovers separated blobs for every seed") {
    const DataMatrix data = two_blobs(10, 3);
    const Partition expected = canonicalize(
        std::vector<int>{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(kmeans(data, 2, seed) == expected);
    }
}

TEST_CASE("kmeans with k == n puts every point in its own cluster") {
    DataMatrix data;
    data.rows = 4;
    data.cols = 1;
    data.values = {0.0, 10.0, 20.0, 30.0};
    const Partition p = kmeans(data, 4, 1);
    CHECK(p.n_clusters() == 4);
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    const DataMatrix data = two_blobs(25, 8);
    const Partition a = kmeans(data, 5, 1234);
    const Partition b = kmeans(data, 5, 1234);
    CHECK(a == b);
    CHECK_THROWS(kmeans(data, 51, 1));
}

TEST_CASE("kmeans objective is non-increasing") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        DataMatrix data;
        data.rows = 10 + rng.below(60);
        data.cols = 1 + rng.below(4);
        for (std::size_t i = 0; i < data.rows * data.cols; ++i) {
            data.values.push_back(rng.uniform() * 10.0);
        }
        std::vector<double> trace;
        kmeans(data, 2 + rng.below(5), trial, 50, 0.0, &trace);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i] <= trace[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("generate_ensemble is reproducible and sized correctly") {
    Dataset ds;
    ds.points = two_blobs(12, 5);
    ds.name = "blobs";
    GeneratorConfig cfg;
    cfg.k = 2;
    cfg.runs = 17;
    cfg.seed = 99;
    const Ensemble a = generate_ensemble(ds, cfg);
    REQUIRE(a.size() == 17);
    CHECK(a.n_points() == 24);
    const Ensemble b = generate_ensemble(ds, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.member(i) == b.member(i));

    cfg.runs = 1;
    CHECK(generate_ensemble(ds, cfg).size() == 1);
}

TEST_CASE("generated partitions have exactly k clusters after repair") {
    Rng rng(4);
    DataMatrix data;
    data.rows = 30;
    data.cols = 2;
    for (std::size_t i = 0; i < 60; ++i) data.values.push_back(rng.uniform());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Partition p = kmeans(data, 6, seed);
        CHECK(p.n_clusters() == 6);
    }
}
