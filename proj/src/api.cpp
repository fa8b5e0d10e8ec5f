#include "stratkit/api.hpp"

#include "stratkit/measures.hpp"
#include "stratkit/splitters.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace stratkit::api {

std::vector<FoldId> split(const LabelMatrix& labels, std::string_view method, FoldId k, std::uint64_t seed,
                          std::string_view measure, int max_epochs) {
  SplitConfig config;
  config.method = parse_method(method);
  config.k = k;
  config.seed = seed;
  config.optimise_measure = parse_measure(measure);
  config.max_epochs = max_epochs;
  return make_split(labels, config).data();
}

std::map<std::string, double> evaluate(const LabelMatrix& labels, std::span<const FoldId> folds) {
  if (static_cast<Index>(folds.size()) != labels.n()) {
    throw Error(fmt::format("evaluate: {} fold indices for {} data points", folds.size(), labels.n()));
  }
  if (folds.empty()) throw Error("evaluate: empty fold vector");
  const FoldId k = *std::max_element(folds.begin(), folds.end()) + 1;
  const Evaluation e = evaluate_all(labels, FoldAssignment(k, {folds.begin(), folds.end()}));
  return {{"ed", e.ed}, {"ld", e.ld}, {"dcp", e.dcp}, {"rld", e.rld}};
}

}  // namespace stratkit::api
