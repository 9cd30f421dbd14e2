#include "esdf/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace esdf {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    if (line.find(',') != std::string::npos) {
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) fields.push_back(field);
    } else {
        std::istringstream ss(line);
        std::string field;
        while (ss >> field) fields.push_back(field);
    }
    for (std::string& f : fields) {
        const auto begin = f.find_first_not_of(" \t\r");
        const auto end = f.find_last_not_of(" \t\r");
        f = begin == std::string::npos ? std::string() : f.substr(begin, end - begin + 1);
    }
    return fields;
}

bool parse_real(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_index(const std::string& spec, std::size_t& out) {
    if (spec.empty()) return false;
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), value);
    if (ec != std::errc() || ptr != spec.data() + spec.size()) return false;
    out = value;
    return true;
}

}  // namespace

void standardize(DataMatrix& m) {
    for (std::size_t c = 0; c < m.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rows; ++r) mean += m.at(r, c);
        mean /= static_cast<double>(m.rows);
        double var = 0.0;
        for (std::size_t r = 0; r < m.rows; ++r) {
            const double dev = m.at(r, c) - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(m.rows);
        const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
        for (std::size_t r = 0; r < m.rows; ++r) {
            m.values[r * m.cols + c] = (m.at(r, c) - mean) * scale;
        }
    }
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    const bool label_named = options.label_column.rfind("name:", 0) == 0;
    std::string wanted_name = label_named ? options.label_column.substr(5) : std::string();

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_numbers;
    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (label_named && header.empty()) {
            header = std::move(fields);
            continue;
        }
        rows.push_back(std::move(fields));
        row_numbers.push_back(line_no);
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");

    const std::size_t arity = rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != arity) {
            throw std::runtime_error(path + ": row " + std::to_string(row_numbers[i]) +
                                     " has " + std::to_string(rows[i].size()) +
                                     " fields, expected " + std::to_string(arity));
        }
    }

    // Resolve the label column index, if any.
    std::size_t label_col = arity;  // arity means "no label"
    if (options.label_column == "first") {
        label_col = 0;
    } else if (options.label_column == "last") {
        label_col = arity - 1;
    } else if (options.label_column == "none" || options.label_column.empty()) {
        label_col = arity;
    } else if (label_named) {
        auto it = std::find(header.begin(), header.end(), wanted_name);
        if (it == header.end()) {
            throw std::runtime_error(path + ": no column named '" + wanted_name + "' in header");
        }
        label_col = static_cast<std::size_t>(it - header.begin());
    } else if (std::size_t idx = 0; parse_index(options.label_column, idx)) {
        if (idx >= arity) {
            throw std::runtime_error(path + ": label column " + std::to_string(idx) +
                                     " out of range (row arity " + std::to_string(arity) + ")");
        }
        label_col = idx;
    } else {
        throw std::runtime_error("bad label column spec: " + options.label_column);
    }

    std::vector<bool> dropped(arity, false);
    for (std::size_t c : options.drop_columns) {
        if (c >= arity) {
            throw std::runtime_error(path + ": drop column " + std::to_string(c) +
                                     " out of range");
        }
        dropped[c] = true;
    }
    if (label_col < arity && dropped[label_col]) {
        throw std::runtime_error(path + ": label column is also marked for dropping");
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < arity; ++c) {
        if (c != label_col && !dropped[c]) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw std::runtime_error(path + ": no feature columns left");

    Dataset ds;
    ds.name = std::filesystem::path(path).stem().string();
    ds.points.rows = rows.size();
    ds.points.cols = feature_cols.size();
    ds.points.values.reserve(rows.size() * feature_cols.size());
    std::vector<std::string> raw_labels;
    raw_labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c : feature_cols) {
            double value = 0.0;
            if (!parse_real(rows[i][c], value)) {
                throw std::runtime_error(path + ": row " + std::to_string(row_numbers[i]) +
                                         ": non-numeric feature value '" + rows[i][c] + "'");
            }
            ds.points.values.push_back(value);
        }
        if (label_col < arity) raw_labels.push_back(rows[i][label_col]);
    }
    if (ds.points.rows < 2) throw std::runtime_error(path + ": need at least 2 data rows");
    if (label_col < arity) ds.true_labels = canonicalize(raw_labels);
    if (options.standardize) standardize(ds.points);
    return ds;
}

}  // namespace esdf
