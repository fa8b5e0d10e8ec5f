#pragma once

#include "stratkit/core.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stratkit {

enum class Measure { ld, ed, rld, dcp };

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view name);

/// Per-class scores (retained classes, ascending class index) and their mean.
/// ED is class-independent: `per_class` is empty and `aggregate` holds the value.
struct MeasureReport {
  Measure measure = Measure::rld;
  std::string measure_name;
  Eigen::VectorXd per_class;
  double aggregate = 0.0;
  std::vector<ClassId> excluded_classes;
  /// (class, fold) pairs where the LD odds were smoothed because the fold is all-positive.
  std::vector<std::pair<ClassId, FoldId>> flags;
};

namespace kernel {

// Single-class score kernels. `pos` is one column of the k x q count matrix and
// `sizes` the fold sizes; `total` and `n` are |D^i| and |D|. All are O(k).

template <typename Scalar, typename PosDerived, typename SizeDerived>
Scalar rld(const Eigen::MatrixBase<PosDerived>& pos, const Eigen::MatrixBase<SizeDerived>& sizes, Count total,
           Count n) {
  const Scalar d = Scalar(total) / Scalar(n);
  Scalar acc(0);
  for (Index j = 0; j < pos.size(); ++j) {
    const Scalar p = Scalar(pos(j)) / Scalar(sizes(j));
    acc += std::abs((d - p) / d);
  }
  return acc / Scalar(pos.size());
}

template <typename Scalar, typename PosDerived>
Scalar dcp(const Eigen::MatrixBase<PosDerived>& pos, Count total) {
  return std::abs(Scalar(pos.maxCoeff()) / Scalar(total) - Scalar(1) / Scalar(pos.size()));
}

/// `on_smoothed(j)` is invoked for every fold whose odds needed the max(neg, 1) guard.
template <typename Scalar, typename PosDerived, typename SizeDerived, typename OnSmoothed>
Scalar ld(const Eigen::MatrixBase<PosDerived>& pos, const Eigen::MatrixBase<SizeDerived>& sizes, Count total,
          Count n, OnSmoothed&& on_smoothed) {
  const Scalar global_odds = Scalar(total) / Scalar(n - total);
  Scalar acc(0);
  for (Index j = 0; j < pos.size(); ++j) {
    Count neg = Count(sizes(j)) - Count(pos(j));
    if (neg <= 0) {
      neg = 1;
      on_smoothed(j);
    }
    acc += std::abs(Scalar(pos(j)) / Scalar(neg) - global_odds);
  }
  return acc / Scalar(pos.size());
}

template <typename Scalar, typename PosDerived, typename SizeDerived>
Scalar ld(const Eigen::MatrixBase<PosDerived>& pos, const Eigen::MatrixBase<SizeDerived>& sizes, Count total,
          Count n) {
  return ld<Scalar>(pos, sizes, total, n, [](Index) {});
}

template <typename Scalar, typename SizeDerived>
Scalar ed(const Eigen::MatrixBase<SizeDerived>& sizes, Count n) {
  const Scalar target = Scalar(n) / Scalar(sizes.size());
  Scalar acc(0);
  for (Index j = 0; j < sizes.size(); ++j) acc += std::abs(Scalar(sizes(j)) - target);
  return acc / Scalar(sizes.size());
}

/// Dispatches a per-class measure on raw count data. ED has no per-class form.
template <typename Scalar, typename PosDerived, typename SizeDerived>
Scalar class_score(Measure m, const Eigen::MatrixBase<PosDerived>& pos, const Eigen::MatrixBase<SizeDerived>& sizes,
                   Count total, Count n) {
  switch (m) {
    case Measure::rld: return rld<Scalar>(pos, sizes, total, n);
    case Measure::dcp: return dcp<Scalar>(pos, total);
    case Measure::ld: return ld<Scalar>(pos, sizes, total, n);
    case Measure::ed: break;
  }
  throw Error("ED has no per-class score");
}

}  // namespace kernel

MeasureReport ld(const FoldClassCounts& counts);
MeasureReport ed(const FoldClassCounts& counts);
MeasureReport rld(const FoldClassCounts& counts);
MeasureReport dcp(const FoldClassCounts& counts);
MeasureReport evaluate(Measure m, const FoldClassCounts& counts);

/// Score of a single retained class; equals the matching entry of the full report.
double per_class_score(Measure m, const FoldClassCounts& counts, ClassId cls);

/// The four aggregate scores of one fold assignment.
struct Evaluation {
  double ed = 0.0;
  double ld = 0.0;
  double dcp = 0.0;
  double rld = 0.0;
};

Evaluation evaluate_all(const FoldClassCounts& counts);
Evaluation evaluate_all(const LabelMatrix& labels, const FoldAssignment& folds);

}  // namespace stratkit
