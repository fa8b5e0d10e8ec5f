#pragma once

#include "stratkit/core.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace stratkit {

/// Fold-distribution patterns used to probe how the measures react to class size.
enum class Scenario { equal, difference, one_missing };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

struct SyntheticSpec {
  Index n = 100000;
  Index q = 100;
  FoldId k = 10;
  Scenario scenario = Scenario::equal;

  void validate() const;
};

/// Class sizes 2k + j(n/2 - 2k)/q for j = 0..q-1, rounded to the nearest multiple of k.
std::vector<Count> synthetic_class_sizes(const SyntheticSpec& spec);

/**
 * Count matrix realising the scenario for every class, with all folds of size n/k.
 *   equal:       c/k in every fold.
 *   difference:  fold 0 holds round(1.2 c/k), fold 1 round(0.8 c/k) (each at least one
 *                point away from c/k), the last fold absorbs the rounding residue.
 *   one_missing: fold 0 holds nothing, the others share c as evenly as possible.
 */
FoldClassCounts synthetic_counts(const SyntheticSpec& spec);

struct SyntheticRow {
  ClassId class_index = 0;
  Count class_size = 0;
  double ld = 0.0;
  double rld = 0.0;
  double dcp = 0.0;
};

std::vector<SyntheticRow> synthetic_report(const SyntheticSpec& spec);

struct MaterialisedSplit {
  LabelMatrix labels;
  FoldAssignment folds;
};

/// Realises synthetic_counts() as concrete points: fold j holds points
/// [j n/k, (j+1) n/k) and build_counts() on the result reproduces the counts.
MaterialisedSplit materialise(const SyntheticSpec& spec);

/// Size profile of a real multilabel dataset (class-size quantiles are nearest-rank).
struct DatasetProfile {
  Index n = 0;
  Index q = 0;
  double density = 0.0;
  Count min = 0;
  Count p25 = 0;
  Count p50 = 0;
  Count p75 = 0;
  Count max = 0;
};

/// bibtex: 7395 points, 159 labels, density 0.0151, class sizes 51/61/82/130/1042.
DatasetProfile bibtex_profile();

/// Sorted class sizes whose nearest-rank quantiles equal the profile's and whose
/// sum matches the profile density to within rounding.
std::vector<Count> profile_class_sizes(const DatasetProfile& profile);

/// Label co-occurrence knobs for surrogate_dataset().
struct SurrogateShape {
  int topics = 12;
  double topic_boost = 6.0;       // sampling weight multiplier for same-topic points
  double propensity_sigma = 0.8;  // log-normal spread of per-point label propensity
};

/**
 * Seeded sparse surrogate matching a profile's size, density and class-size
 * quantiles. Points get a log-normal label propensity and a topic; classes prefer
 * points of their own topic, which produces label co-occurrence. Every point
 * carries at least one label whenever the profile has at least n positives.
 */
LabelMatrix surrogate_dataset(const DatasetProfile& profile, std::uint64_t seed, const SurrogateShape& shape = {});

}  // namespace stratkit
