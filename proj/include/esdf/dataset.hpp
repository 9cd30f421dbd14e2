#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "esdf/partition.hpp"

namespace esdf {

/// Row-major numeric matrix.
struct DataMatrix {
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    const double* row(std::size_t r) const { return values.data() + r * cols; }
};

/// A labeled tabular dataset: feature matrix plus optional ground truth.
struct Dataset {
    DataMatrix points;
    std::optional<Partition> true_labels;
    std::string name;

    std::size_t n() const { return points.rows; }
    std::size_t d() const { return points.cols; }
};

/// Where the class column sits. Accepted specs: "first", "last", "none",
/// a 0-based column index, or "name:<header>" (requires a header row).
struct LoadOptions {
    std::string label_column = "last";
    std::vector<std::size_t> drop_columns;  // 0-based, before label extraction
    bool standardize = false;               // per-feature z-scoring
};

/// Load a CSV or whitespace-delimited text file. Lines starting with '#'
/// and blank lines are skipped; the label column (if any) is canonicalized
/// into ground truth; every other column must parse as a real number.
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});

/// In-place per-feature z-scoring; constant features are left centered.
void standardize(DataMatrix& m);

}  // namespace esdf
