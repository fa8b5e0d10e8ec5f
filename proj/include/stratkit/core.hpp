#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratkit {

using Index = Eigen::Index;
using ClassId = std::int32_t;
using FoldId = std::int32_t;
using Count = std::int64_t;

using CountMatrix = Eigen::Matrix<Count, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<Count, Eigen::Dynamic, 1>;

/// Raised for every contract violation in the library (bad dimensions, malformed
/// input, invalid configuration). The CLI maps it to a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Sparse binary n x q target matrix.
 *
 * Stored twice: row-major (positive classes of each point, strictly increasing)
 * and column-major (points positive for each class, increasing). Both views are
 * immutable after construction.
 */
class LabelMatrix {
 public:
  LabelMatrix() = default;

  /// Each row lists the positive class indices of one data point. Rows must be
  /// strictly increasing with every index in [0, q).
  LabelMatrix(Index q, const std::vector<std::vector<ClassId>>& rows);

  /// Builds from any dense Eigen expression; nonzero entries are positives.
  template <typename Derived>
  static LabelMatrix from_dense(const Eigen::DenseBase<Derived>& dense) {
    std::vector<std::vector<ClassId>> rows(static_cast<std::size_t>(dense.rows()));
    for (Index i = 0; i < dense.rows(); ++i) {
      for (Index c = 0; c < dense.cols(); ++c) {
        if (dense(i, c) != typename Derived::Scalar(0)) {
          rows[static_cast<std::size_t>(i)].push_back(static_cast<ClassId>(c));
        }
      }
    }
    return LabelMatrix(dense.cols(), rows);
  }

  Index n() const { return static_cast<Index>(row_offsets_.size()) - 1; }
  Index q() const { return q_; }
  Count nnz() const { return static_cast<Count>(row_classes_.size()); }

  std::span<const ClassId> row(Index point) const;
  std::span<const Index> members(ClassId cls) const;
  bool has_label(Index point, ClassId cls) const;

  const CountVector& class_sizes() const { return class_sizes_; }

  /// Dense 0/1 copy; intended for small matrices (tests, bindings).
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> to_dense() const;

  friend bool operator==(const LabelMatrix& a, const LabelMatrix& b) {
    return a.q_ == b.q_ && a.row_offsets_ == b.row_offsets_ && a.row_classes_ == b.row_classes_;
  }

 private:
  Index q_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<ClassId> row_classes_;
  std::vector<Index> col_offsets_{0};
  std::vector<Index> col_points_;
  CountVector class_sizes_;
};

/// Total map from data points to folds. Every fold in [0, k) is non-empty.
class FoldAssignment {
 public:
  FoldAssignment() = default;
  FoldAssignment(FoldId k, std::vector<FoldId> assignment);

  FoldId k() const { return k_; }
  Index n() const { return static_cast<Index>(assignment_.size()); }
  FoldId operator[](Index point) const { return assignment_[static_cast<std::size_t>(point)]; }
  const std::vector<FoldId>& data() const { return assignment_; }
  CountVector fold_sizes() const;

  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;

 private:
  FoldId k_ = 0;
  std::vector<FoldId> assignment_;
};

/**
 * Per-fold, per-class positive counts: the sufficient statistic consumed by every
 * split-quality measure. Classes with no positives, or no negatives, are recorded
 * in `excluded_classes` and skipped by the measures.
 */
struct FoldClassCounts {
  FoldId k = 0;
  Index q = 0;
  CountMatrix pos;          // k x q, |S_j^i|
  CountVector fold_sizes;   // k, |S_j|
  CountVector total_pos;    // q, |D^i|
  Count n_total = 0;        // |D|
  std::vector<ClassId> excluded_classes;
  std::vector<ClassId> retained_classes;

  /// Builds the view from raw counts, deriving totals and the exclusion list.
  static FoldClassCounts from_counts(CountMatrix pos, CountVector fold_sizes);

  bool is_retained(ClassId cls) const;
  double positive_frequency(FoldId fold, ClassId cls) const;
  double global_frequency(ClassId cls) const;

  /// Throws Error when an invariant is broken.
  void validate() const;

  friend bool operator==(const FoldClassCounts& a, const FoldClassCounts& b);
};

FoldClassCounts build_counts(const LabelMatrix& labels, const FoldAssignment& folds);

/// Returns the counts after moving `point` from fold `from` to fold `to`.
FoldClassCounts counts_after_move(FoldClassCounts counts, const LabelMatrix& labels,
                                  const FoldAssignment& folds, Index point, FoldId from, FoldId to);

/// In-place version without membership checks; used by the optimiser's hot loop.
void apply_move(FoldClassCounts& counts, std::span<const ClassId> point_classes, FoldId from, FoldId to);

}  // namespace stratkit
