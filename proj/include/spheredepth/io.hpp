#pragma once

// CSV ingestion, report serialization and atomic file output.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "spheredepth/error.hpp"
#include "spheredepth/rng.hpp"
#include "spheredepth/sample_set.hpp"

namespace spheredepth {

inline constexpr const char* kVersion = "0.1.0";

struct LabeledDataset {
    SampleSet samples;
    std::vector<int> labels;  ///< 1 = anomaly
    std::string name;
};

/// Label column given by header name or 0-based index; negative indices count from the end.
using ColumnRef = std::variant<std::string, long>;

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(delim, start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

// Strict parse: whole cell must be a finite real.
inline bool parse_real(std::string_view cell, double& out) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

inline bool is_nonfinite_token(std::string_view cell) {
    std::string lower;
    for (char ch : cell) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (!lower.empty() && (lower.front() == '-' || lower.front() == '+')) lower.erase(0, 1);
    return lower == "nan" || lower == "inf" || lower == "infinity";
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> line_numbers;
    std::size_t columns = 0;
};

inline CsvTable tokenize(std::string_view text, char delim) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool first = true;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        const std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        if (trim(line).empty()) continue;
        auto cells = split(line, delim);
        if (first) {
            first = false;
            table.columns = cells.size();
            // a first row with a non-numeric cell (other than nan/inf spellings) is a header
            bool header = false;
            for (auto c : cells) {
                double tmp;
                if (!parse_real(c, tmp) && !is_nonfinite_token(c)) header = true;
            }
            if (header) {
                for (auto c : cells) table.header.emplace_back(c);
                continue;
            }
        }
        if (cells.size() != table.columns)
            throw ParseError("expected " + std::to_string(table.columns) + " cells, found " + std::to_string(cells.size()),
                             line_no, cells.size());
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    if (table.rows.empty()) throw ParseError("CSV contains no data rows");
    return table;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Matrix parse_features(const CsvTable& t, std::size_t skip_column) {
    const std::size_t d = t.columns - (skip_column < t.columns ? 1 : 0);
    if (d == 0) throw ParseError("CSV has no feature columns");
    Matrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        std::size_t out_col = 0;
        for (std::size_t j = 0; j < t.columns; ++j) {
            if (j == skip_column) continue;
            double v;
            if (!parse_real(t.rows[i][j], v))
                throw ParseError("invalid numeric cell '" + std::string(t.rows[i][j]) + "'", t.line_numbers[i], j + 1);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out_col++)) = v;
        }
    }
    return m;
}

}  // namespace detail

/// Parses labeled CSV text: feature columns plus one 0/1 label column.
inline LabeledDataset parse_labeled_csv(std::string_view text, const ColumnRef& label_column, char delimiter = ',',
                                        std::string name = "dataset") {
    const auto table = detail::tokenize(text, delimiter);
    std::size_t label_idx = 0;
    if (const auto* col_name = std::get_if<std::string>(&label_column)) {
        const auto it = std::find(table.header.begin(), table.header.end(), *col_name);
        if (it == table.header.end()) throw ParseError("label column '" + *col_name + "' not found");
        label_idx = static_cast<std::size_t>(it - table.header.begin());
    } else {
        long idx = std::get<long>(label_column);
        if (idx < 0) idx += static_cast<long>(table.columns);
        if (idx < 0 || idx >= static_cast<long>(table.columns))
            throw ParseError("label column index out of range");
        label_idx = static_cast<std::size_t>(idx);
    }
    if (table.columns < 2) throw ParseError("labeled CSV needs at least one feature column");

    Matrix features = detail::parse_features(table, label_idx);
    std::vector<int> labels;
    labels.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        double v;
        if (!detail::parse_real(table.rows[i][label_idx], v) || (v != 0.0 && v != 1.0))
            throw ParseError("label must be 0 or 1, got '" + std::string(table.rows[i][label_idx]) + "'",
                             table.line_numbers[i], label_idx + 1);
        labels.push_back(static_cast<int>(v));
    }
    return {SampleSet(std::move(features)), std::move(labels), std::move(name)};
}

inline LabeledDataset load_labeled_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                                       char delimiter = ',') {
    return parse_labeled_csv(detail::read_file(path), label_column, delimiter, path.stem().string());
}

/// All columns are features.
inline SampleSet parse_numeric_csv(std::string_view text, char delimiter = ',') {
    const auto table = detail::tokenize(text, delimiter);
    return SampleSet(detail::parse_features(table, static_cast<std::size_t>(-1)));
}

inline SampleSet load_numeric_csv(const std::filesystem::path& path, char delimiter = ',') {
    return parse_numeric_csv(detail::read_file(path), delimiter);
}

/// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string to_csv(const Matrix& m, char delimiter = ',', const std::vector<std::string>& header = {}) {
    std::string out;
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j) out += delimiter;
            out += header[j];
        }
        out += '\n';
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += delimiter;
            out += format_real(m(i, j));
        }
        out += '\n';
    }
    return out;
}

struct ExperimentReport {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["parameters"] = parameters;
        j["metrics"] = metrics;
        j["provenance"] = provenance;
        return j;
    }
    std::string dump() const { return to_json().dump(2) + "\n"; }
};

inline nlohmann::ordered_json default_provenance(std::uint64_t seed) {
    return {{"library", "spheredepth"}, {"version", kVersion}, {"rng", kRngName}, {"seed", seed}};
}

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace spheredepth
