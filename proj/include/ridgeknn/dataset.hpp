#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ridgeknn/types.hpp"

namespace ridgeknn {

/// Labeled objects: one row of `features` per object.
///
/// Labels are dense ids in [0, class_count). `label_names` keeps the original
/// token of each id (first-appearance order when loaded from a file).
struct Dataset {
  Matrix features;
  LabelList labels;
  int class_count = 0;
  std::string name;
  std::vector<std::string> label_names;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }

  /// Throws InvalidArgument if any type invariant is violated.
  void validate() const {
    require(features.rows() >= 1 && features.cols() >= 1, "dataset must have n >= 1 and d >= 1");
    require(static_cast<Index>(labels.size()) == features.rows(),
            "dataset label count does not match row count");
    require(class_count >= 1, "class_count must be positive");
    std::vector<char> seen(static_cast<std::size_t>(class_count), 0);
    for (auto y : labels) {
      require(y >= 0 && y < class_count, "label " + std::to_string(y) + " outside [0, class_count)");
      seen[static_cast<std::size_t>(y)] = 1;
    }
    for (int c = 0; c < class_count; ++c) {
      require(seen[static_cast<std::size_t>(c)], "class " + std::to_string(c) + " has no members");
    }
    require(features.allFinite(), "dataset contains non-finite feature values");
  }

  std::string label_name(Label y) const {
    if (y >= 0 && static_cast<std::size_t>(y) < label_names.size()) {
      return label_names[static_cast<std::size_t>(y)];
    }
    return std::to_string(y);
  }

  /// Member count per class id.
  std::vector<std::size_t> class_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(class_count), 0);
    for (auto y : labels) ++sizes[static_cast<std::size_t>(y)];
    return sizes;
  }

  /// Rows selected by `rows`; labels keep the parent's id space.
  Dataset subset(const IndexList& rows) const {
    Dataset out;
    out.features = select_rows(features, rows);
    out.labels = select(labels, rows);
    out.class_count = class_count;
    out.name = name;
    out.label_names = label_names;
    return out;
  }

  /// Same objects with the feature matrix replaced (e.g. after projection).
  Dataset with_features(Matrix f) const {
    require(f.rows() == features.rows(), "replacement features must keep the row count");
    Dataset out = *this;
    out.features = std::move(f);
    return out;
  }
};

enum class Format { DenseCsv, SparsePairs };

inline Format parse_format(std::string_view s) {
  if (s == "dense-csv" || s == "csv") return Format::DenseCsv;
  if (s == "sparse-pairs" || s == "sparse") return Format::SparsePairs;
  throw InvalidArgument("unknown dataset format '" + std::string(s) +
                        "' (expected dense-csv or sparse-pairs)");
}

inline std::string to_string(Format f) {
  return f == Format::DenseCsv ? "dense-csv" : "sparse-pairs";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view token, std::size_t line, std::size_t column) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("cannot parse '" + std::string(token) + "' as a real number", line, column);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value '" + std::string(token) + "'", line, column);
  }
  return value;
}

/// Maps label tokens to dense ids in first-appearance order.
class LabelEncoder {
 public:
  Label encode(std::string_view token) {
    auto [it, inserted] = ids_.try_emplace(std::string(token), static_cast<Label>(names_.size()));
    if (inserted) names_.emplace_back(token);
    return it->second;
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::unordered_map<std::string, Label> ids_;
  std::vector<std::string> names_;
};

inline bool skip_line(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

inline Dataset finish(std::vector<std::vector<double>> rows, Index d, LabelList labels,
                      LabelEncoder encoder, std::string name) {
  if (rows.empty()) throw ParseError("file contains no data rows", 1, 0);
  Dataset ds;
  ds.features.setZero(static_cast<Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      ds.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  ds.labels = std::move(labels);
  ds.label_names = encoder.names();
  ds.class_count = static_cast<int>(ds.label_names.size());
  ds.name = std::move(name);
  ds.validate();
  return ds;
}

}  // namespace detail

/// Parses dense-csv text: `v1,...,vd,label` per line, `#` lines ignored.
inline Dataset parse_dense_csv(std::istream& in, std::string name = "") {
  std::vector<std::vector<double>> rows;
  LabelList labels;
  detail::LabelEncoder encoder;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) {
      throw ParseError("expected at least one feature and a label", line_no, 0);
    }
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw ParseError("inconsistent column count: expected " + std::to_string(width) + ", got " +
                           std::to_string(fields.size()),
                       line_no, 0);
    }
    std::vector<double> row(fields.size() - 1);
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
      row[j] = detail::parse_real(fields[j], line_no, j + 1);
    }
    auto token = detail::trim(fields.back());
    if (token.empty()) throw ParseError("empty label", line_no, fields.size());
    labels.push_back(encoder.encode(token));
    rows.push_back(std::move(row));
  }
  return detail::finish(std::move(rows), static_cast<Index>(width ? width - 1 : 0),
                        std::move(labels), std::move(encoder), std::move(name));
}

/// Parses sparse-pairs text: `label idx:val idx:val ...` with 1-based indices.
/// The dimension is the largest index seen; absent entries are zero.
inline Dataset parse_sparse_pairs(std::istream& in, std::string name = "") {
  std::vector<std::vector<double>> rows;
  LabelList labels;
  detail::LabelEncoder encoder;
  std::size_t d = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::istringstream tokens(line);
    std::string token;
    tokens >> token;
    labels.push_back(encoder.encode(token));
    std::vector<std::pair<std::size_t, double>> entries;
    std::size_t column = 1;
    while (tokens >> token) {
      ++column;
      auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw ParseError("expected idx:val pair, got '" + token + "'", line_no, column);
      }
      std::size_t idx = 0;
      std::string_view idx_text(token.data(), colon);
      auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || idx == 0) {
        throw ParseError("invalid 1-based feature index '" + std::string(idx_text) + "'", line_no,
                         column);
      }
      double v = detail::parse_real(std::string_view(token).substr(colon + 1), line_no, column);
      entries.emplace_back(idx, v);
      d = std::max(d, idx);
    }
    std::sort(entries.begin(), entries.end());
    for (std::size_t e = 1; e < entries.size(); ++e) {
      if (entries[e].first == entries[e - 1].first) {
        throw ParseError("duplicate feature index " + std::to_string(entries[e].first), line_no, 0);
      }
    }
    std::vector<double> row;
    row.reserve(entries.size());
    // Stored sparse here; densified once the final dimension is known.
    for (auto& [idx, v] : entries) {
      if (row.size() < idx) row.resize(idx, 0.0);
      row[idx - 1] = v;
    }
    rows.push_back(std::move(row));
  }
  if (!rows.empty() && d == 0) throw ParseError("no feature entries in file", 1, 0);
  return detail::finish(std::move(rows), static_cast<Index>(d), std::move(labels),
                        std::move(encoder), std::move(name));
}

inline Dataset load_dataset(const std::string& path, Format format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file '" + path + "'");
  auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  return format == Format::DenseCsv ? parse_dense_csv(in, name) : parse_sparse_pairs(in, name);
}

/// Writes the dataset as dense-csv with the original label tokens.
inline void write_dense_csv(std::ostream& out, const Dataset& ds) {
  out.precision(17);
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index j = 0; j < ds.dim(); ++j) out << ds.features(i, j) << ',';
    out << ds.label_name(ds.labels[static_cast<std::size_t>(i)]) << '\n';
  }
}

}  // namespace ridgeknn
