#include "stratkit/core.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace stratkit {

LabelMatrix::LabelMatrix(Index q, const std::vector<std::vector<ClassId>>& rows) : q_(q) {
  if (q < 0) throw Error("label matrix: negative class count");
  row_offsets_.reserve(rows.size() + 1);
  class_sizes_ = CountVector::Zero(q);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (std::size_t t = 0; t < r.size(); ++t) {
      if (r[t] < 0 || r[t] >= q) {
        throw Error(fmt::format("label matrix: class index {} out of range [0, {}) in row {}", r[t], q, i));
      }
      if (t > 0 && r[t] <= r[t - 1]) {
        throw Error(fmt::format("label matrix: row {} is not strictly increasing", i));
      }
      ++class_sizes_(r[t]);
    }
    row_classes_.insert(row_classes_.end(), r.begin(), r.end());
    row_offsets_.push_back(static_cast<Index>(row_classes_.size()));
  }

  // Column view by counting sort; points come out ascending within each class.
  col_offsets_.assign(static_cast<std::size_t>(q) + 1, 0);
  for (Index c = 0; c < q; ++c) col_offsets_[static_cast<std::size_t>(c) + 1] = col_offsets_[c] + class_sizes_(c);
  col_points_.resize(row_classes_.size());
  std::vector<Index> cursor(col_offsets_.begin(), col_offsets_.end() - 1);
  for (Index i = 0; i < n(); ++i) {
    for (ClassId c : row(i)) col_points_[static_cast<std::size_t>(cursor[c]++)] = i;
  }
}

std::span<const ClassId> LabelMatrix::row(Index point) const {
  const auto b = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(point)]);
  const auto e = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(point) + 1]);
  return {row_classes_.data() + b, e - b};
}

std::span<const Index> LabelMatrix::members(ClassId cls) const {
  const auto b = static_cast<std::size_t>(col_offsets_[static_cast<std::size_t>(cls)]);
  const auto e = static_cast<std::size_t>(col_offsets_[static_cast<std::size_t>(cls) + 1]);
  return {col_points_.data() + b, e - b};
}

bool LabelMatrix::has_label(Index point, ClassId cls) const {
  const auto r = row(point);
  return std::binary_search(r.begin(), r.end(), cls);
}

Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> LabelMatrix::to_dense() const {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> dense =
      Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n(), q());
  for (Index i = 0; i < n(); ++i) {
    for (ClassId c : row(i)) dense(i, c) = 1;
  }
  return dense;
}

FoldAssignment::FoldAssignment(FoldId k, std::vector<FoldId> assignment) : k_(k), assignment_(std::move(assignment)) {
  if (k < 1) throw Error(fmt::format("fold assignment: k must be positive, got {}", k));
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const FoldId f = assignment_[i];
    if (f < 0 || f >= k) throw Error(fmt::format("fold assignment: point {} has fold {} outside [0, {})", i, f, k));
    seen[static_cast<std::size_t>(f)] = 1;
  }
  const auto empty = std::find(seen.begin(), seen.end(), 0);
  if (empty != seen.end()) {
    throw Error(fmt::format("fold assignment: fold {} is empty", empty - seen.begin()));
  }
}

CountVector FoldAssignment::fold_sizes() const {
  CountVector sizes = CountVector::Zero(k_);
  for (FoldId f : assignment_) ++sizes(f);
  return sizes;
}

FoldClassCounts FoldClassCounts::from_counts(CountMatrix pos, CountVector fold_sizes) {
  if (pos.rows() != fold_sizes.size()) {
    throw Error(fmt::format("fold counts: {} count rows but {} fold sizes", pos.rows(), fold_sizes.size()));
  }
  FoldClassCounts counts;
  counts.k = static_cast<FoldId>(pos.rows());
  counts.q = pos.cols();
  counts.total_pos = pos.colwise().sum().transpose();
  counts.n_total = fold_sizes.sum();
  counts.pos = std::move(pos);
  counts.fold_sizes = std::move(fold_sizes);
  for (Index c = 0; c < counts.q; ++c) {
    const Count t = counts.total_pos(c);
    if (t <= 0 || t >= counts.n_total) {
      counts.excluded_classes.push_back(static_cast<ClassId>(c));
    } else {
      counts.retained_classes.push_back(static_cast<ClassId>(c));
    }
  }
  counts.validate();
  return counts;
}

bool FoldClassCounts::is_retained(ClassId cls) const {
  return cls >= 0 && cls < q && !std::binary_search(excluded_classes.begin(), excluded_classes.end(), cls);
}

double FoldClassCounts::positive_frequency(FoldId fold, ClassId cls) const {
  return static_cast<double>(pos(fold, cls)) / static_cast<double>(fold_sizes(fold));
}

double FoldClassCounts::global_frequency(ClassId cls) const {
  return static_cast<double>(total_pos(cls)) / static_cast<double>(n_total);
}

void FoldClassCounts::validate() const {
  if (pos.rows() != k || pos.cols() != q || fold_sizes.size() != k || total_pos.size() != q) {
    throw Error("fold counts: inconsistent dimensions");
  }
  if ((pos.array() < 0).any() || (fold_sizes.array() < 0).any()) throw Error("fold counts: negative count");
  if ((pos.colwise().sum().transpose() - total_pos).any()) throw Error("fold counts: column sums differ from class totals");
  if (fold_sizes.sum() != n_total) throw Error("fold counts: fold sizes do not sum to the dataset size");
  for (Index j = 0; j < k; ++j) {
    if ((pos.row(j).array() > fold_sizes(j)).any()) {
      throw Error(fmt::format("fold counts: fold {} holds more positives than points", j));
    }
  }
  for (ClassId c : retained_classes) {
    if (total_pos(c) <= 0 || total_pos(c) >= n_total) {
      throw Error(fmt::format("fold counts: class {} retained without positives and negatives", c));
    }
  }
}

bool operator==(const FoldClassCounts& a, const FoldClassCounts& b) {
  return a.k == b.k && a.q == b.q && a.n_total == b.n_total && a.pos == b.pos && a.fold_sizes == b.fold_sizes &&
         a.total_pos == b.total_pos && a.excluded_classes == b.excluded_classes &&
         a.retained_classes == b.retained_classes;
}

FoldClassCounts build_counts(const LabelMatrix& labels, const FoldAssignment& folds) {
  if (labels.n() != folds.n()) {
    throw Error(fmt::format("fold assignment covers {} points but the label matrix has {}", folds.n(), labels.n()));
  }
  CountMatrix pos = CountMatrix::Zero(folds.k(), labels.q());
  for (Index i = 0; i < labels.n(); ++i) {
    const FoldId f = folds[i];
    for (ClassId c : labels.row(i)) ++pos(f, c);
  }
  return FoldClassCounts::from_counts(std::move(pos), folds.fold_sizes());
}

void apply_move(FoldClassCounts& counts, std::span<const ClassId> point_classes, FoldId from, FoldId to) {
  for (ClassId c : point_classes) {
    --counts.pos(from, c);
    ++counts.pos(to, c);
  }
  --counts.fold_sizes(from);
  ++counts.fold_sizes(to);
}

FoldClassCounts counts_after_move(FoldClassCounts counts, const LabelMatrix& labels, const FoldAssignment& folds,
                                  Index point, FoldId from, FoldId to) {
  if (labels.n() != folds.n()) throw Error("counts_after_move: label/fold dimension mismatch");
  if (point < 0 || point >= labels.n()) throw Error(fmt::format("counts_after_move: point {} out of range", point));
  if (from < 0 || from >= counts.k || to < 0 || to >= counts.k) {
    throw Error(fmt::format("counts_after_move: fold index out of range [0, {})", counts.k));
  }
  if (from == to) throw Error("counts_after_move: source and destination fold are the same");
  if (folds[point] != from) {
    throw Error(fmt::format("counts_after_move: point {} is in fold {}, not {}", point, folds[point], from));
  }
  apply_move(counts, labels.row(point), from, to);
  return counts;
}

}  // namespace stratkit
