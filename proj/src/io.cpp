#include "stratkit/io.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace stratkit::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

template <typename T>
T parse_int(std::string_view token, std::string_view what, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(fmt::format("line {}: invalid {} '{}'", line, what, token));
  }
  return value;
}

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(fmt::format("line {}: invalid number '{}'", line, token));
  }
  return value;
}

void require_trailing_blank(std::istream& in, std::size_t line, std::string_view what) {
  std::string rest;
  while (std::getline(in, rest)) {
    ++line;
    if (!trim(rest).empty()) throw Error(fmt::format("line {}: unexpected content after the last {}", line, what));
  }
}

LabelMatrix parse_label_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("label file is empty");
  const auto header = split_ws(line);
  if (header.size() != 2) throw Error("line 1: header must be \"n q\"");
  const auto n = parse_int<Index>(header[0], "point count", 1);
  const auto q = parse_int<Index>(header[1], "class count", 1);
  if (n <= 0 || q <= 0) throw Error(fmt::format("line 1: empty dataset (n = {}, q = {})", n, q));

  std::vector<std::vector<ClassId>> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::size_t lineno = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) throw Error(fmt::format("expected {} label rows, found {}", n, i));
    auto& row = rows[static_cast<std::size_t>(i)];
    for (std::string_view token : split_ws(line)) {
      const auto c = parse_int<ClassId>(token, "class index", lineno);
      if (c < 0 || c >= q) throw Error(fmt::format("line {}: class index {} outside [0, {})", lineno, c, q));
      row.push_back(c);
    }
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw Error(fmt::format("line {}: duplicate class index", lineno));
    }
  }
  require_trailing_blank(in, static_cast<std::size_t>(n) + 1, "label row");
  return LabelMatrix(q, rows);
}

LabelMatrix parse_dense_csv(std::istream& in) {
  std::vector<std::vector<ClassId>> rows;
  Index q = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto cells = split_on(body, ',');
    if (q < 0) q = static_cast<Index>(cells.size());
    if (static_cast<Index>(cells.size()) != q) {
      throw Error(fmt::format("line {}: expected {} columns, found {}", lineno, q, cells.size()));
    }
    auto& row = rows.emplace_back();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string_view cell = trim(cells[c]);
      if (cell == "1") {
        row.push_back(static_cast<ClassId>(c));
      } else if (cell != "0") {
        throw Error(fmt::format("line {}: column {} is '{}', expected 0 or 1", lineno, c, cell));
      }
    }
  }
  if (rows.empty()) throw Error("dense CSV is empty");
  return LabelMatrix(q, rows);
}

}  // namespace

LabelFormat parse_label_format(std::string_view name) {
  if (name == "label-list") return LabelFormat::label_list;
  if (name == "dense-csv") return LabelFormat::dense_csv;
  throw Error(fmt::format("unknown label format '{}' (expected label-list or dense-csv)", name));
}

LabelMatrix parse_labels(std::istream& in, LabelFormat format) {
  return format == LabelFormat::label_list ? parse_label_list(in) : parse_dense_csv(in);
}

LabelMatrix read_labels(const std::filesystem::path& path, LabelFormat format) {
  auto in = open_in(path);
  try {
    return parse_labels(in, format);
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_labels(std::ostream& out, const LabelMatrix& labels) {
  out << labels.n() << ' ' << labels.q() << '\n';
  for (Index i = 0; i < labels.n(); ++i) {
    const auto row = labels.row(i);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t > 0) out << ' ';
      out << row[t];
    }
    out << '\n';
  }
}

void write_labels(const std::filesystem::path& path, const LabelMatrix& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
  finish_write(out, path);
}

FoldAssignment parse_folds(std::istream& in, Index n, std::optional<FoldId> k) {
  std::vector<FoldId> assignment;
  assignment.reserve(static_cast<std::size_t>(std::max<Index>(n, 0)));
  std::string line;
  std::size_t lineno = 0;
  while (static_cast<Index>(assignment.size()) < n && std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) throw Error(fmt::format("line {}: missing fold index", lineno));
    const auto f = parse_int<FoldId>(body, "fold index", lineno);
    if (f < 0 || (k && f >= *k)) {
      throw Error(fmt::format("line {}: fold index {} outside [0, {})", lineno, f, k ? *k : 0));
    }
    assignment.push_back(f);
  }
  if (static_cast<Index>(assignment.size()) != n) {
    throw Error(fmt::format("fold file has {} lines, expected {}", assignment.size(), n));
  }
  require_trailing_blank(in, lineno, "fold index");
  const FoldId folds = k ? *k : (assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1);
  return FoldAssignment(folds, std::move(assignment));
}

FoldAssignment read_folds(const std::filesystem::path& path, Index n, std::optional<FoldId> k) {
  auto in = open_in(path);
  try {
    return parse_folds(in, n, k);
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_folds(std::ostream& out, const FoldAssignment& folds) {
  for (FoldId f : folds.data()) out << f << '\n';
}

void write_folds(const std::filesystem::path& path, const FoldAssignment& folds) {
  auto out = open_out(path);
  write_folds(out, folds);
  finish_write(out, path);
}

void write_indices(const std::filesystem::path& path, const std::vector<Index>& indices) {
  auto out = open_out(path);
  for (Index i : indices) out << i << '\n';
  finish_write(out, path);
}

std::vector<Index> read_indices(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Index> indices;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    indices.push_back(parse_int<Index>(body, "index", lineno));
  }
  return indices;
}

std::string format_double(double value) { return fmt::format("{}", value); }

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(fmt::format("CSV has no column '{}'", name));
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::vector<std::string> cells;
    for (std::string_view cell : split_on(body, ',')) cells.emplace_back(trim(cell));
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else if (cells.size() != table.header.size()) {
      throw Error(fmt::format("line {}: expected {} columns, found {}", lineno, table.header.size(), cells.size()));
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw Error("CSV is empty");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << '\n';
  for (const ReportRow& r : rows) {
    out << r.dataset << ',' << r.method << ',' << r.seed << ',';
    if (r.scores) {
      out << format_double(r.scores->ed) << ',' << format_double(r.scores->ld) << ','
          << format_double(r.scores->dcp) << ',' << format_double(r.scores->rld) << ','
          << format_double(r.runtime_s) << '\n';
    } else {
      out << "error,error,error,error,error\n";
    }
  }
}

std::vector<ReportRow> parse_report(std::istream& in) {
  const CsvTable table = parse_csv(in);
  const std::vector<std::string> expected = [] {
    std::vector<std::string> cols;
    for (std::string_view c : split_on(kReportHeader, ',')) cols.emplace_back(c);
    return cols;
  }();
  if (table.header != expected) throw Error("report CSV header does not match");

  std::vector<ReportRow> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    ReportRow row{cells[0], cells[1], cells[2], std::nullopt, 0.0, {}};
    if (cells[3] == "error") {
      row.error = "error";
    } else {
      const std::size_t lineno = r + 2;
      row.scores = Evaluation{parse_double(cells[3], lineno), parse_double(cells[4], lineno),
                              parse_double(cells[5], lineno), parse_double(cells[6], lineno)};
      row.runtime_s = parse_double(cells[7], lineno);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

DatasetStats dataset_stats(const LabelMatrix& labels) {
  if (labels.n() == 0) throw Error("dataset_stats: empty dataset");
  std::vector<Count> sizes;
  for (Index c = 0; c < labels.q(); ++c) {
    const Count s = labels.class_sizes()(c);
    if (s > 0 && s < labels.n()) sizes.push_back(s);
  }
  if (sizes.empty()) throw Error("dataset_stats: no class has both positive and negative data points");
  std::sort(sizes.begin(), sizes.end());

  const auto q = static_cast<Index>(sizes.size());
  auto nearest_rank = [&](double p) {
    const auto rank = std::max<Index>(1, static_cast<Index>(std::ceil(p * static_cast<double>(q))));
    return sizes[static_cast<std::size_t>(rank - 1)];
  };
  Count positives = 0;
  for (Count s : sizes) positives += s;

  DatasetStats stats;
  stats.n = labels.n();
  stats.q = q;
  stats.density = static_cast<double>(positives) / (static_cast<double>(labels.n()) * static_cast<double>(q));
  stats.min = sizes.front();
  stats.p25 = nearest_rank(0.25);
  stats.p50 = nearest_rank(0.50);
  stats.p75 = nearest_rank(0.75);
  stats.max = sizes.back();
  return stats;
}

}  // namespace stratkit::io
