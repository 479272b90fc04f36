#pragma once

// CSV ingestion and the per-dataset manifests that turn raw tables into
// labeled Datasets.
//
// Manifest format: one `key = value` per line, `#` starts a comment. Keys
// prefixed with `<variant>.` apply only when that variant is selected and
// override the unprefixed key. Recognized keys:
//
//   name, note, source_url       free text
//   files                        comma list of paths relative to the data dir; concatenated
//   delimiter                    single character, `comma`, `tab` or `whitespace`
//   has_header                   true / false
//   label_column                 column index or header name
//   feature_columns              `all`, or comma list of indices, `a-b` index ranges and header names
//   ignore_columns               excluded from `all`
//   feature_names                comma list
//   labels                       raw label texts; list position is the class index
//   class_names                  display names, parallel to labels
//   variants                     comma list of selectable variants (first is the default)
//   binary_outliers              raw labels relabeled as class 1, every other row becomes class 0
//   outlier_limit                keep at most this many outlier rows (seeded choice, file order kept)
//   sample_seed                  seed for outlier_limit

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pmmknn/core.hpp"
#include "pmmknn/error.hpp"
#include "pmmknn/random.hpp"

namespace pmmknn {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Delimiter value that splits on runs of spaces and tabs.
inline constexpr char kWhitespaceDelimiter = ' ';

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

inline std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return buf.str();
}

}  // namespace detail

/// Parses RFC 4180 style text: double-quoted fields may contain the delimiter,
/// newlines and doubled quotes. Unquoted cells are whitespace-trimmed; blank
/// lines are skipped. With kWhitespaceDelimiter, runs of spaces/tabs separate
/// fields. Every row must have as many cells as the first row (or header).
inline RawTable parse_csv(std::string_view text, bool has_header = false, char delimiter = ',') {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  std::vector<std::string> record;
  std::string cell;
  bool quoted_cell = false;
  bool in_quotes = false;
  bool cell_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  const bool whitespace = delimiter == kWhitespaceDelimiter;

  auto end_cell = [&] {
    record.push_back(quoted_cell ? cell : std::string(detail::trim(cell)));
    cell.clear();
    quoted_cell = false;
    cell_started = false;
  };
  auto end_record = [&] {
    if (cell_started || quoted_cell) end_cell();
    const bool blank = record.empty() || (record.size() == 1 && record[0].empty());
    if (!blank) {
      records.push_back(std::move(record));
      record_lines.push_back(record_line);
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        cell.push_back(ch);
      }
      continue;
    }
    if (quoted_cell && !whitespace && (ch == ' ' || ch == '\t')) continue;  // padding after a closing quote
    if (ch == '"' && detail::trim(cell).empty()) {
      cell.clear();
      in_quotes = true;
      quoted_cell = true;
      cell_started = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      ++line;
      record_line = line;
    } else if (whitespace && (ch == ' ' || ch == '\t')) {
      if (cell_started) end_cell();
    } else if (!whitespace && ch == delimiter) {
      end_cell();
      cell_started = true;  // the cell after a delimiter exists even if empty
    } else {
      cell.push_back(ch);
      cell_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field starting near line " + std::to_string(record_line));
  end_record();

  if (records.empty()) throw ParseError("CSV input contains no rows");
  RawTable table;
  std::size_t first = 0;
  if (has_header) {
    table.header = std::move(records[0]);
    first = 1;
  }
  const std::size_t width = has_header ? table.header.size() : records[0].size();
  for (std::size_t r = first; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw ParseError("row at line " + std::to_string(record_lines[r]) + " has " +
                       std::to_string(records[r].size()) + " cells, expected " + std::to_string(width));
    }
    table.rows.push_back(std::move(records[r]));
  }
  if (!has_header) {
    for (std::size_t j = 0; j < width; ++j) table.header.push_back(std::to_string(j));
  }
  return table;
}

inline RawTable load_csv(const std::filesystem::path& path, bool has_header = false, char delimiter = ',') {
  const std::string text = detail::read_file(path);
  try {
    return parse_csv(text, has_header, delimiter);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct DatasetManifest {
  std::string name;
  std::string variant;
  std::vector<std::string> variants;
  std::vector<std::string> files;
  char delimiter = ',';
  bool has_header = false;
  std::string label_column;
  std::string feature_columns = "all";
  std::vector<std::string> ignore_columns;
  std::vector<std::string> feature_names;
  std::vector<std::string> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> binary_outliers;
  std::optional<std::size_t> outlier_limit;
  std::uint64_t sample_seed = 42;
  std::string source_url;
  std::string note;
};

/// Parses manifest text and resolves the requested variant ("" selects the
/// first listed variant).
inline DatasetManifest parse_manifest(std::string_view text, std::string_view variant = {}) {
  std::map<std::string, std::string, std::less<>> entries;
  std::size_t line_no = 0;
  for (const auto& raw : detail::split_list(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected key = value");
    }
    entries[std::string(detail::trim(line.substr(0, eq)))] = std::string(detail::trim(line.substr(eq + 1)));
  }

  DatasetManifest m;
  auto base = [&](std::string_view key) -> std::optional<std::string> {
    if (auto it = entries.find(key); it != entries.end()) return it->second;
    return std::nullopt;
  };
  m.variants = detail::split_list(base("variants").value_or("standard"));
  if (m.variants.empty()) m.variants.push_back("standard");
  m.variant = variant.empty() ? m.variants.front() : std::string(variant);
  if (std::find(m.variants.begin(), m.variants.end(), m.variant) == m.variants.end()) {
    throw ParseError("unknown variant '" + m.variant + "'");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = entries.find(m.variant + "." + key); it != entries.end()) return it->second;
    return base(key);
  };

  m.name = get("name").value_or("");
  m.files = detail::split_list(get("files").value_or(""));
  if (m.files.empty()) throw ParseError("manifest needs a files entry");
  const std::string delim = get("delimiter").value_or(",");
  if (delim == "whitespace") {
    m.delimiter = kWhitespaceDelimiter;
  } else if (delim == "tab") {
    m.delimiter = '\t';
  } else if (delim == "comma") {
    m.delimiter = ',';
  } else if (delim.size() == 1) {
    m.delimiter = delim[0];
  } else {
    throw ParseError("unsupported delimiter '" + delim + "'");
  }
  const std::string header = get("has_header").value_or("false");
  if (header != "true" && header != "false") throw ParseError("has_header must be true or false");
  m.has_header = header == "true";
  m.label_column = get("label_column").value_or("");
  if (m.label_column.empty()) throw ParseError("manifest needs a label_column entry");
  m.feature_columns = get("feature_columns").value_or("all");
  m.ignore_columns = detail::split_list(get("ignore_columns").value_or(""));
  m.feature_names = detail::split_list(get("feature_names").value_or(""));
  m.labels = detail::split_list(get("labels").value_or(""));
  if (m.labels.empty()) throw ParseError("manifest needs a labels entry");
  m.class_names = detail::split_list(get("class_names").value_or(""));
  m.binary_outliers = detail::split_list(get("binary_outliers").value_or(""));
  if (auto limit = get("outlier_limit")) {
    m.outlier_limit = detail::parse_index(*limit);
    if (!m.outlier_limit) throw ParseError("outlier_limit must be a nonnegative integer");
  }
  if (auto seed = get("sample_seed")) {
    auto parsed = detail::parse_index(*seed);
    if (!parsed) throw ParseError("sample_seed must be a nonnegative integer");
    m.sample_seed = *parsed;
  }
  if (m.binary_outliers.empty()) {
    if (m.class_names.empty()) m.class_names = m.labels;
    if (m.class_names.size() != m.labels.size()) throw ParseError("class_names and labels differ in length");
  } else {
    if (m.class_names.empty()) m.class_names = {"inlier", "outlier"};
    if (m.class_names.size() != 2) throw ParseError("binary outlier variants need exactly two class_names");
  }
  m.source_url = get("source_url").value_or("");
  m.note = get("note").value_or("");
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path, std::string_view variant = {}) {
  try {
    return parse_manifest(detail::read_file(path), variant);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace detail {

inline std::size_t resolve_column(const RawTable& table, std::string_view ref) {
  if (auto idx = parse_index(ref)) {
    if (*idx >= table.header.size()) throw ParseError("column index " + std::string(ref) + " out of range");
    return *idx;
  }
  auto it = std::find(table.header.begin(), table.header.end(), ref);
  if (it == table.header.end()) throw ParseError("no column named '" + std::string(ref) + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

inline std::vector<std::size_t> resolve_features(const RawTable& table, const DatasetManifest& m,
                                                 std::size_t label_col) {
  std::vector<std::size_t> cols;
  if (m.feature_columns == "all") {
    std::set<std::size_t> ignored;
    for (const auto& ref : m.ignore_columns) ignored.insert(resolve_column(table, ref));
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (j != label_col && !ignored.count(j)) cols.push_back(j);
    }
  } else {
    for (const auto& token : split_list(m.feature_columns)) {
      const auto dash = token.find('-');
      if (dash != std::string::npos && dash > 0) {
        auto lo = parse_index(std::string_view(token).substr(0, dash));
        auto hi = parse_index(std::string_view(token).substr(dash + 1));
        if (lo && hi) {
          if (*lo > *hi || *hi >= table.header.size()) throw ParseError("bad column range '" + token + "'");
          for (std::size_t j = *lo; j <= *hi; ++j) cols.push_back(j);
          continue;
        }
      }
      cols.push_back(resolve_column(table, token));
    }
  }
  if (cols.empty()) throw ParseError("manifest selects no feature columns");
  if (std::find(cols.begin(), cols.end(), label_col) != cols.end()) {
    throw ParseError("feature columns include the label column");
  }
  return cols;
}

}  // namespace detail

/// Builds a Dataset from a parsed table using the manifest's column selection,
/// label mapping and variant rules. Row i of the table becomes sample i unless
/// an outlier limit drops rows.
inline Dataset to_dataset(const RawTable& table, const DatasetManifest& m) {
  const std::size_t label_col = detail::resolve_column(table, m.label_column);
  const auto cols = detail::resolve_features(table, m, label_col);
  std::map<std::string, ClassIndex, std::less<>> mapping;
  for (std::size_t c = 0; c < m.labels.size(); ++c) mapping.emplace(m.labels[c], c);
  const std::set<std::string, std::less<>> outliers(m.binary_outliers.begin(), m.binary_outliers.end());
  for (const auto& o : outliers) {
    if (!mapping.count(o)) throw LabelError("outlier label '" + o + "' is not in the label mapping");
  }

  std::vector<ClassIndex> labels;
  std::vector<double> features;
  labels.reserve(table.rows.size());
  features.reserve(table.rows.size() * cols.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string& raw = row[label_col];
    auto it = mapping.find(raw);
    if (it == mapping.end()) {
      throw LabelError("row " + std::to_string(r + 1) + ": label '" + raw + "' is not in the manifest mapping");
    }
    labels.push_back(outliers.empty() ? it->second : (outliers.count(raw) ? 1 : 0));
    for (auto j : cols) {
      auto value = detail::parse_real(row[j]);
      if (!value || !std::isfinite(*value)) {
        throw ParseError("row " + std::to_string(r + 1) + ", column " + table.header[j] + ": '" + row[j] +
                         "' is not a finite number");
      }
      features.push_back(*value);
    }
  }

  if (!outliers.empty() && m.outlier_limit) {
    std::vector<std::size_t> outlier_rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == 1) outlier_rows.push_back(i);
    }
    if (outlier_rows.size() > *m.outlier_limit) {
      Rng rng(m.sample_seed);
      seeded_shuffle(std::span<std::size_t>(outlier_rows), rng);
      std::set<std::size_t> dropped(outlier_rows.begin() + static_cast<std::ptrdiff_t>(*m.outlier_limit),
                                    outlier_rows.end());
      std::vector<ClassIndex> kept_labels;
      std::vector<double> kept_features;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (dropped.count(i)) continue;
        kept_labels.push_back(labels[i]);
        kept_features.insert(kept_features.end(), features.begin() + static_cast<std::ptrdiff_t>(i * cols.size()),
                             features.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols.size()));
      }
      labels = std::move(kept_labels);
      features = std::move(kept_features);
    }
  }

  std::vector<std::string> names = m.feature_names;
  if (names.empty()) {
    for (auto j : cols) names.push_back(m.has_header ? table.header[j] : "f" + std::to_string(j));
  } else if (names.size() != cols.size()) {
    throw ParseError("feature_names has " + std::to_string(names.size()) + " entries for " +
                     std::to_string(cols.size()) + " feature columns");
  }
  if (labels.empty()) throw ParseError("table has no data rows");
  return Dataset(std::move(features), std::move(labels), cols.size(), m.class_names, std::move(names));
}

/// Loads every file named by the manifest (relative to data_dir), concatenates
/// their rows in order and converts them.
inline Dataset load_dataset(const std::filesystem::path& data_dir, const DatasetManifest& m) {
  RawTable merged;
  for (std::size_t f = 0; f < m.files.size(); ++f) {
    const auto path = data_dir / m.files[f];
    if (!std::filesystem::exists(path)) {
      std::string msg = "missing data file '" + path.string() + "'";
      if (!m.source_url.empty()) msg += " (source: " + m.source_url + "; see scripts/fetch_datasets.py)";
      throw IoError(msg);
    }
    auto table = load_csv(path, m.has_header, m.delimiter);
    if (f == 0) {
      merged.header = std::move(table.header);
    } else if (table.header.size() != merged.header.size()) {
      throw ParseError("'" + path.string() + "' has a different column count than '" + m.files[0] + "'");
    }
    for (auto& row : table.rows) merged.rows.push_back(std::move(row));
  }
  return to_dataset(merged, m);
}

struct ValidationReport {
  std::vector<std::size_t> class_counts;
  std::vector<std::string> constant_features;
  std::size_t duplicate_rows = 0;  // rows identical (features and label) to an earlier row
  std::size_t non_finite_values = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  bool ok() const noexcept { return errors.empty(); }
};

inline ValidationReport validate_dataset(const Dataset& data) {
  ValidationReport report;
  report.class_counts = data.class_counts();
  for (std::size_t c = 0; c < report.class_counts.size(); ++c) {
    if (report.class_counts[c] == 0) report.errors.push_back("class '" + data.class_names()[c] + "' is empty");
  }
  for (std::size_t j = 0; j < data.dimensionality(); ++j) {
    const double first = data.row(0)[j];
    bool constant = true;
    for (std::size_t i = 1; i < data.size() && constant; ++i) constant = data.row(i)[j] == first;
    if (constant) {
      report.constant_features.push_back(data.feature_names()[j]);
      report.warnings.push_back("feature '" + data.feature_names()[j] + "' is constant");
    }
  }
  for (double v : data.features()) {
    if (!std::isfinite(v)) ++report.non_finite_values;
  }
  if (report.non_finite_values > 0) report.errors.push_back("dataset contains non-finite values");
  std::set<std::pair<std::vector<double>, ClassIndex>> seen;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto r = data.row(i);
    if (!seen.emplace(std::vector<double>(r.begin(), r.end()), data.label(i)).second) ++report.duplicate_rows;
  }
  return report;
}

/// Header row of feature names plus `label`, then one row per sample with
/// shortest round-trip number formatting and the class name as label.
inline std::string to_csv(const Dataset& data) {
  std::string out;
  for (const auto& name : data.feature_names()) out += name + ",";
  out += "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out += detail::format_real(v) + ",";
    out += data.class_names()[data.label(i)] + "\n";
  }
  return out;
}

}  // namespace pmmknn
