#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/error.hpp"
#include "uforest/format.hpp"
#include "uforest/forest.hpp"

namespace uforest::io {

namespace detail {

inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace detail

/// Whole-file read; DataError when unreadable.
inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes `text`, creating parent directories.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

/// Parses CSV text with a header row. The label column (when named and
/// present) may hold any strings; they become codes in first-appearance
/// order. Without it the dataset is unlabeled and every column is a feature.
inline LabeledDataset parse_csv(const std::string& text, const std::optional<std::string>& label_column = "y",
                                const std::string& source = "<csv>") {
  const auto lines = detail::lines_of(text);
  if (lines.empty()) throw DataError(source + ": empty file");
  std::vector<std::string> header = detail::split_line(lines[0]);
  for (auto& h : header) h = std::string(detail::trim(h));

  std::optional<std::size_t> label_at;
  if (label_column) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == *label_column) label_at = c;
  }
  LabeledDataset data;
  data.label_column = label_column.value_or("y");
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_at) data.feature_names.push_back(header[c]);
  if (data.feature_names.empty()) throw DataError(source + ": no feature columns");

  std::vector<double> values;
  std::vector<ClassLabel> labels;
  std::map<std::string, ClassLabel> codes;
  std::size_t rows = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = detail::split_line(lines[li]);
    const std::string where = source + ": row " + std::to_string(li + 1);
    if (cells.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_at) {
        const std::string name(detail::trim(cells[c]));
        auto [it, inserted] = codes.try_emplace(name, static_cast<ClassLabel>(data.label_names.size()));
        if (inserted) data.label_names.push_back(name);
        labels.push_back(it->second);
        continue;
      }
      const auto v = detail::parse_double(cells[c]);
      if (!v) throw DataError(where + ", column '" + header[c] + "': not a number: '" + cells[c] + "'");
      if (!std::isfinite(*v)) throw DataError(where + ", column '" + header[c] + "': non-finite value");
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError(source + ": no data rows");
  data.features = FeatureMatrix(rows, data.feature_names.size(), std::move(values));
  if (label_at) data.labels = std::move(labels);
  return data;
}

inline LabeledDataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column = "y") {
  return parse_csv(read_text(path), label_column, path.string());
}

/// Features in shortest round-trip form, label names last.
inline std::string format_csv(const LabeledDataset& data) {
  std::string out;
  for (std::size_t c = 0; c < data.dim(); ++c) {
    if (c) out += ',';
    out += detail::quote_if_needed(data.feature_names[c]);
  }
  if (data.labeled()) out += ',' + detail::quote_if_needed(data.label_column);
  out += '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dim(); ++c) {
      if (c) out += ',';
      out += format_shortest(data.features(r, c));
    }
    if (data.labeled()) out += ',' + detail::quote_if_needed(data.label_names[static_cast<std::size_t>((*data.labels)[r])]);
    out += '\n';
  }
  return out;
}

inline void save_csv(const LabeledDataset& data, const std::filesystem::path& path) {
  write_text(path, format_csv(data));
}

/// One line of a result table.
struct SweepRow {
  std::string estimator;
  std::size_t n = 0;
  std::size_t d = 0;
  double mu = std::nan("");
  double pi = std::nan("");
  std::uint64_t seed = 0;
  double h_y = 0.0;
  double h_y_given_x = 0.0;
  double mi = 0.0;
  double mi_normalized = 0.0;
  double wall_time_ms = 0.0;

  static SweepRow from_report(const EstimateReport& r, double mu = std::nan(""), double pi = std::nan("")) {
    return {r.estimator, r.n, r.d, mu, pi, r.seed, r.h_y, r.h_y_given_x, r.mi, r.mi_normalized, 0.0};
  }

  // NaN-aware so reloaded tables compare equal.
  friend bool operator==(const SweepRow& a, const SweepRow& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.estimator == b.estimator && a.n == b.n && a.d == b.d && same(a.mu, b.mu) && same(a.pi, b.pi) &&
           a.seed == b.seed && same(a.h_y, b.h_y) && same(a.h_y_given_x, b.h_y_given_x) && same(a.mi, b.mi) &&
           same(a.mi_normalized, b.mi_normalized) && same(a.wall_time_ms, b.wall_time_ms);
  }
};

inline const char* const kReportHeader = "estimator,n,d,mu,pi,seed,h_y,h_y_given_x,mi,mi_normalized,wall_time_ms";

inline std::string format_report(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kReportHeader) + '\n';
  for (const auto& r : rows) {
    out += detail::quote_if_needed(r.estimator) + ',' + std::to_string(r.n) + ',' + std::to_string(r.d) + ',' +
           format_g17(r.mu) + ',' + format_g17(r.pi) + ',' + std::to_string(r.seed) + ',' + format_g17(r.h_y) + ',' +
           format_g17(r.h_y_given_x) + ',' + format_g17(r.mi) + ',' + format_g17(r.mi_normalized) + ',' +
           format_g17(r.wall_time_ms) + '\n';
  }
  return out;
}

inline void save_report(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  write_text(path, format_report(rows));
}

inline std::vector<SweepRow> parse_report(const std::string& text, const std::string& source = "<report>") {
  const auto lines = detail::lines_of(text);
  if (lines.empty() || lines[0] != kReportHeader) throw DataError(source + ": not a report file (bad header)");
  std::vector<SweepRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto c = detail::split_line(lines[li]);
    const std::string where = source + ": row " + std::to_string(li + 1);
    if (c.size() != 11) throw DataError(where + ": expected 11 cells");
    auto num = [&](std::size_t i) {
      std::string_view s = detail::trim(c[i]);
      if (s == "nan" || s == "-nan") return std::nan("");
      const auto v = detail::parse_double(s);
      if (!v) throw DataError(where + ": bad number '" + c[i] + "'");
      return *v;
    };
    auto integer = [&](std::size_t i) {
      std::uint64_t v = 0;
      const std::string_view s = detail::trim(c[i]);
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError(where + ": bad integer '" + c[i] + "'");
      return v;
    };
    rows.push_back({c[0], integer(1), integer(2), num(3), num(4), integer(5), num(6), num(7), num(8), num(9), num(10)});
  }
  return rows;
}

inline std::vector<SweepRow> load_report(const std::filesystem::path& path) {
  return parse_report(read_text(path), path.string());
}

/// Fully resolved parameters of one CLI command.
struct RunConfig {
  std::string setting = "spherical";
  std::string input;               // dataset CSV; empty means simulate
  std::string label_column = "y";
  std::string estimator = "uf";
  ForestConfig forest{};
  std::size_t knn_k = 3;
  std::vector<std::size_t> n_grid{6000};
  std::vector<std::size_t> d_grid{1};
  std::vector<double> mu_grid{1.0};
  std::vector<double> pi_grid{0.5};
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string output;

  void validate() const {
    if (n_grid.empty() || d_grid.empty() || mu_grid.empty() || pi_grid.empty()) throw ConfigError("grids must be nonempty");
    if (trials == 0) throw ConfigError("trials must be >= 1");
    forest.validate();
  }
};

}  // namespace uforest::io
