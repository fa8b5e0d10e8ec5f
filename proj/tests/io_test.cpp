#include "stratkit/io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

namespace stratkit::io {
namespace {

LabelMatrix parse(const std::string& text, LabelFormat format = LabelFormat::label_list) {
  std::istringstream in(text);
  return parse_labels(in, format);
}

FoldAssignment folds_from(const std::string& text, Index n, std::optional<FoldId> k = std::nullopt) {
  std::istringstream in(text);
  return parse_folds(in, n, k);
}

TEST(LabelList, ParsesExample) {
  const LabelMatrix m = parse("4 2\n0\n0 1\n\n1\n");
  EXPECT_EQ(m.n(), 4);
  EXPECT_EQ(m.q(), 2);
  EXPECT_EQ(m.class_sizes(), (CountVector(2) << 2, 2).finished());
  EXPECT_TRUE(m.row(2).empty());
}

TEST(LabelList, Errors) {
  EXPECT_THROW(parse("0 0\n"), Error);
  EXPECT_THROW(parse(""), Error);
  EXPECT_THROW(parse("2\n0\n1\n"), Error);
  EXPECT_THROW(parse("2 2\n0\n"), Error);            // missing row
  EXPECT_THROW(parse("2 2\n0\n2\n"), Error);         // index >= q
  EXPECT_THROW(parse("2 2\n0 0\n1\n"), Error);       // duplicate
  EXPECT_THROW(parse("2 2\n0\n1\n1\n"), Error);      // extra row
  EXPECT_THROW(parse("2 2\n0\nx\n"), Error);
  EXPECT_NO_THROW(parse("2 2\n0\n1\n\n"));
  EXPECT_EQ(parse("1 3\n2 0\n").row(0)[0], 0);     // rows are sorted on input
}

TEST(DenseCsv, Parses) {
  const LabelMatrix m = parse("1,0\n0,1\n", LabelFormat::dense_csv);
  EXPECT_EQ(m, LabelMatrix(2, {{0}, {1}}));
  EXPECT_THROW(parse("1,0\n0\n", LabelFormat::dense_csv), Error);
  EXPECT_THROW(parse("1,2\n", LabelFormat::dense_csv), Error);
  EXPECT_THROW(parse("", LabelFormat::dense_csv), Error);
  EXPECT_EQ(parse_label_format("dense-csv"), LabelFormat::dense_csv);
  EXPECT_THROW(parse_label_format("arff"), Error);
}

TEST(Folds, WriteFormat) {
  std::ostringstream out;
  write_folds(out, FoldAssignment(2, {0, 1, 0, 1}));
  EXPECT_EQ(out.str(), "0\n1\n0\n1\n");
}

TEST(Folds, Errors) {
  EXPECT_THROW(folds_from("0\n2\n", 2, 2), Error);
  EXPECT_THROW(folds_from("0\n1\n", 3), Error);
  EXPECT_THROW(folds_from("0\n1\n0\n", 2), Error);
  EXPECT_THROW(folds_from("0\n-1\n", 2), Error);
  EXPECT_THROW(folds_from("0\n\n1\n", 3), Error);
  EXPECT_THROW(folds_from("0\n0\n", 2, 2), Error);  // fold 1 empty
  EXPECT_EQ(folds_from("0\n2\n1\n", 3).k(), 3);
}

TEST(RoundTrip, LabelsAndFolds) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(1, 80)(rng);
    const Index q = std::uniform_int_distribution<Index>(1, 12)(rng);
    const LabelMatrix m = testing::random_labels(n, q, 0.25, rng);
    std::stringstream buf;
    write_labels(buf, m);
    EXPECT_EQ(parse_labels(buf), m);

    const FoldId k = std::uniform_int_distribution<FoldId>(1, static_cast<FoldId>(std::min<Index>(n, 6)))(rng);
    const auto folds = testing::random_folds(n, k, rng);
    std::stringstream fbuf;
    write_folds(fbuf, folds);
    EXPECT_EQ(parse_folds(fbuf, n, k), folds);
  }
}

TEST(RoundTrip, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "stratkit_io_test";
  std::filesystem::create_directories(dir);
  const LabelMatrix m(3, {{0, 2}, {}, {1}});
  write_labels(dir / "l.txt", m);
  EXPECT_EQ(read_labels(dir / "l.txt"), m);
  write_indices(dir / "i.txt", {4, 0, 9});
  EXPECT_EQ(read_indices(dir / "i.txt"), (std::vector<Index>{4, 0, 9}));
  EXPECT_THROW(read_labels(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Report, RoundTripWithErrorRows) {
  std::vector<ReportRow> rows{
      {"bibtex", "random", "0", Evaluation{0.0, 0.1 + 0.2, 1.0 / 3.0, 1e-17}, 0.25, {}},
      {"bibtex", "ss", "0", std::nullopt, 0.0, "not implemented"},
      {"bibtex", "random", "mean", Evaluation{1.5, 2.0, 3.0, 4.0}, 1.0, {}},
  };
  std::stringstream buf;
  write_report(buf, rows);
  const auto back = parse_report(buf);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].scores->ld, 0.1 + 0.2);
  EXPECT_EQ(back[0].scores->dcp, 1.0 / 3.0);
  EXPECT_EQ(back[0].scores->rld, 1e-17);
  EXPECT_FALSE(back[1].scores);
  EXPECT_EQ(back[2].seed, "mean");

  std::istringstream bad("dataset,method\n");
  EXPECT_THROW(parse_report(bad), Error);
}

TEST(Csv, ColumnsAndShape) {
  std::istringstream in("a,b\n1,2\n\n3,4\n");
  const CsvTable t = parse_csv(in);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_THROW(t.column("c"), Error);
  std::istringstream ragged("a,b\n1\n");
  EXPECT_THROW(parse_csv(ragged), Error);
}

TEST(Stats, Examples) {
  std::vector<std::vector<ClassId>> rows(10);
  for (int i = 0; i < 5; ++i) rows[static_cast<std::size_t>(i)] = {0};
  const DatasetStats one = dataset_stats(LabelMatrix(1, rows));
  EXPECT_EQ(one.q, 1);
  EXPECT_EQ(one.min, 5);
  EXPECT_EQ(one.p25, 5);
  EXPECT_EQ(one.p50, 5);
  EXPECT_EQ(one.p75, 5);
  EXPECT_EQ(one.max, 5);
  EXPECT_DOUBLE_EQ(one.density, 0.5);

  std::vector<std::vector<ClassId>> two(10);
  for (int i = 0; i < 8; ++i) two[static_cast<std::size_t>(i)].push_back(i < 2 ? 0 : 1);
  for (int i = 0; i < 2; ++i) two[static_cast<std::size_t>(i)].push_back(1);
  const DatasetStats s = dataset_stats(LabelMatrix(2, two));
  EXPECT_EQ(s.min, 2);
  EXPECT_EQ(s.p50, 2);
  EXPECT_EQ(s.max, 8);
}

TEST(Stats, ErrorsAndRowPermutation) {
  EXPECT_THROW(dataset_stats(LabelMatrix(2, {{}, {}, {}})), Error);
  EXPECT_THROW(dataset_stats(LabelMatrix(1, {{0}, {0}})), Error);

  std::mt19937_64 rng(9);
  const LabelMatrix m = testing::random_labels(60, 10, 0.2, rng);
  std::vector<std::vector<ClassId>> rows;
  for (Index i = m.n() - 1; i >= 0; --i) rows.emplace_back(m.row(i).begin(), m.row(i).end());
  const DatasetStats a = dataset_stats(m);
  const DatasetStats b = dataset_stats(LabelMatrix(10, rows));
  EXPECT_EQ(a.density, b.density);
  EXPECT_EQ(a.p25, b.p25);
  EXPECT_EQ(a.p75, b.p75);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

}  // namespace
}  // namespace stratkit::io
