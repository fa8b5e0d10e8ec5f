#include "stratkit/measures.hpp"

#include <fmt/core.h>

namespace stratkit {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::ld: return "ld";
    case Measure::ed: return "ed";
    case Measure::rld: return "rld";
    case Measure::dcp: return "dcp";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  if (name == "ld") return Measure::ld;
  if (name == "ed") return Measure::ed;
  if (name == "rld") return Measure::rld;
  if (name == "dcp") return Measure::dcp;
  throw Error(fmt::format("unknown measure '{}' (expected ld, ed, rld or dcp)", name));
}

namespace {

void require_usable(const FoldClassCounts& counts) {
  if (counts.k < 1) throw Error("measure: no folds");
  if ((counts.fold_sizes.array() <= 0).any()) throw Error("measure: empty fold");
}

void require_retained(const FoldClassCounts& counts) {
  if (counts.retained_classes.empty()) {
    throw Error("measure: no class has both positive and negative data points");
  }
}

MeasureReport start_report(Measure m, const FoldClassCounts& counts) {
  require_usable(counts);
  MeasureReport report;
  report.measure = m;
  report.measure_name = std::string(to_string(m));
  report.excluded_classes = counts.excluded_classes;
  return report;
}

template <typename ClassFn>
MeasureReport per_class_report(Measure m, const FoldClassCounts& counts, ClassFn&& fn) {
  MeasureReport report = start_report(m, counts);
  require_retained(counts);
  const auto& retained = counts.retained_classes;
  report.per_class.resize(static_cast<Index>(retained.size()));
  for (std::size_t t = 0; t < retained.size(); ++t) {
    report.per_class(static_cast<Index>(t)) = fn(retained[t], report);
  }
  report.aggregate = report.per_class.mean();
  return report;
}

}  // namespace

MeasureReport ld(const FoldClassCounts& counts) {
  return per_class_report(Measure::ld, counts, [&](ClassId c, MeasureReport& report) {
    return kernel::ld<double>(counts.pos.col(c), counts.fold_sizes, counts.total_pos(c), counts.n_total,
                              [&](Index j) { report.flags.emplace_back(c, static_cast<FoldId>(j)); });
  });
}

MeasureReport ed(const FoldClassCounts& counts) {
  MeasureReport report = start_report(Measure::ed, counts);
  report.aggregate = kernel::ed<double>(counts.fold_sizes, counts.n_total);
  return report;
}

MeasureReport rld(const FoldClassCounts& counts) {
  return per_class_report(Measure::rld, counts, [&](ClassId c, MeasureReport&) {
    return kernel::rld<double>(counts.pos.col(c), counts.fold_sizes, counts.total_pos(c), counts.n_total);
  });
}

MeasureReport dcp(const FoldClassCounts& counts) {
  return per_class_report(Measure::dcp, counts, [&](ClassId c, MeasureReport&) {
    return kernel::dcp<double>(counts.pos.col(c), counts.total_pos(c));
  });
}

MeasureReport evaluate(Measure m, const FoldClassCounts& counts) {
  switch (m) {
    case Measure::ld: return ld(counts);
    case Measure::ed: return ed(counts);
    case Measure::rld: return rld(counts);
    case Measure::dcp: return dcp(counts);
  }
  throw Error("unknown measure");
}

double per_class_score(Measure m, const FoldClassCounts& counts, ClassId cls) {
  require_usable(counts);
  if (m == Measure::ed) throw Error("ED has no per-class score");
  if (!counts.is_retained(cls)) throw Error(fmt::format("class {} is excluded or out of range", cls));
  return kernel::class_score<double>(m, counts.pos.col(cls), counts.fold_sizes, counts.total_pos(cls),
                                     counts.n_total);
}

Evaluation evaluate_all(const FoldClassCounts& counts) {
  return {ed(counts).aggregate, ld(counts).aggregate, dcp(counts).aggregate, rld(counts).aggregate};
}

Evaluation evaluate_all(const LabelMatrix& labels, const FoldAssignment& folds) {
  return evaluate_all(build_counts(labels, folds));
}

}  // namespace stratkit
