#pragma once

#include "stratkit/core.hpp"
#include "stratkit/measures.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratkit::io {

/// label-list: header "n q", then one line per point with its sorted positive
/// class indices separated by spaces (an empty line means no labels).
/// dense-csv: one comma-separated 0/1 row per point, no header.
enum class LabelFormat { label_list, dense_csv };

LabelFormat parse_label_format(std::string_view name);

LabelMatrix parse_labels(std::istream& in, LabelFormat format = LabelFormat::label_list);
LabelMatrix read_labels(const std::filesystem::path& path, LabelFormat format = LabelFormat::label_list);
void write_labels(std::ostream& out, const LabelMatrix& labels);
void write_labels(const std::filesystem::path& path, const LabelMatrix& labels);

/// Fold file: exactly n lines, one fold index each. When `k` is absent it is
/// taken as one more than the largest index.
FoldAssignment parse_folds(std::istream& in, Index n, std::optional<FoldId> k = std::nullopt);
FoldAssignment read_folds(const std::filesystem::path& path, Index n, std::optional<FoldId> k = std::nullopt);
void write_folds(std::ostream& out, const FoldAssignment& folds);
void write_folds(const std::filesystem::path& path, const FoldAssignment& folds);

/// One point index per line.
void write_indices(const std::filesystem::path& path, const std::vector<Index>& indices);
std::vector<Index> read_indices(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Minimal comma-separated table: header row plus string cells. No quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);

/// One line of a benchmark report. `seed` is a number or "mean". Failed runs
/// carry `error` and print "error" in every measure column.
struct ReportRow {
  std::string dataset;
  std::string method;
  std::string seed;
  std::optional<Evaluation> scores;
  double runtime_s = 0.0;
  std::string error;
};

inline constexpr std::string_view kReportHeader = "dataset,method,seed,ed,ld,dcp,rld,runtime_s";

void write_report(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report(std::istream& in);

struct DatasetStats {
  Index n = 0;
  Index q = 0;  // retained classes
  double density = 0.0;
  Count min = 0;
  Count p25 = 0;
  Count p50 = 0;
  Count p75 = 0;
  Count max = 0;
};

/// Statistics over retained classes (0 < size < n); quantiles are nearest-rank,
/// i.e. the ceil(p q')-th smallest class size.
DatasetStats dataset_stats(const LabelMatrix& labels);

}  // namespace stratkit::io
