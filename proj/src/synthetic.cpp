#include "stratkit/synthetic.hpp"

#include "stratkit/measures.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace stratkit {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::equal: return "equal";
    case Scenario::difference: return "difference";
    case Scenario::one_missing: return "one_missing";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "equal") return Scenario::equal;
  if (name == "difference") return Scenario::difference;
  if (name == "one_missing") return Scenario::one_missing;
  throw Error(fmt::format("unknown scenario '{}' (expected equal, difference or one_missing)", name));
}

void SyntheticSpec::validate() const {
  if (k < 2) throw Error(fmt::format("synthetic: k must be at least 2, got {}", k));
  if (q < 1) throw Error("synthetic: q must be positive");
  if (n < 4 * k) throw Error(fmt::format("synthetic: n = {} is too small for k = {}", n, k));
  if (n % k != 0) throw Error(fmt::format("synthetic: n = {} is not divisible by k = {}", n, k));
}

std::vector<Count> synthetic_class_sizes(const SyntheticSpec& spec) {
  spec.validate();
  const double lo = 2.0 * spec.k;
  const double step = (static_cast<double>(spec.n) / 2.0 - lo) / static_cast<double>(spec.q);
  std::vector<Count> sizes(static_cast<std::size_t>(spec.q));
  for (Index j = 0; j < spec.q; ++j) {
    const double raw = lo + static_cast<double>(j) * step;
    const Count size = std::llround(raw / spec.k) * spec.k;
    if (size <= 0) throw Error(fmt::format("synthetic: class {} rounds to size 0", j));
    sizes[static_cast<std::size_t>(j)] = size;
  }
  return sizes;
}

namespace {

// round(num/10 * base) with halves rounded up, in integers.
Count scaled_tenths(Count base, Count tenths) { return (tenths * base + 5) / 10; }

}  // namespace

FoldClassCounts synthetic_counts(const SyntheticSpec& spec) {
  const std::vector<Count> sizes = synthetic_class_sizes(spec);
  const FoldId k = spec.k;
  const Count fold_size = spec.n / k;
  CountMatrix pos(k, spec.q);

  for (Index c = 0; c < spec.q; ++c) {
    const Count size = sizes[static_cast<std::size_t>(c)];
    const Count base = size / k;
    auto col = pos.col(c);
    switch (spec.scenario) {
      case Scenario::equal:
        col.setConstant(base);
        break;
      case Scenario::difference: {
        col.setConstant(base);
        col(0) = std::max(scaled_tenths(base, 12), base + 1);
        col(1) = std::min(scaled_tenths(base, 8), base - 1);
        col(k - 1) += size - col.sum();
        break;
      }
      case Scenario::one_missing: {
        const Count share = size / (k - 1);
        const Count extra = size % (k - 1);
        col(0) = 0;
        for (FoldId j = 1; j < k; ++j) col(j) = share + (j - 1 < extra ? 1 : 0);
        break;
      }
    }
    if ((col.array() < 0).any() || (col.array() > fold_size).any()) {
      throw Error(fmt::format("synthetic: class {} of size {} cannot realise the {} pattern", c, size,
                              to_string(spec.scenario)));
    }
  }
  return FoldClassCounts::from_counts(std::move(pos), CountVector::Constant(k, fold_size));
}

std::vector<SyntheticRow> synthetic_report(const SyntheticSpec& spec) {
  const FoldClassCounts counts = synthetic_counts(spec);
  const MeasureReport ld_report = ld(counts);
  const MeasureReport rld_report = rld(counts);
  const MeasureReport dcp_report = dcp(counts);

  std::vector<SyntheticRow> rows;
  rows.reserve(counts.retained_classes.size());
  for (std::size_t t = 0; t < counts.retained_classes.size(); ++t) {
    const ClassId c = counts.retained_classes[t];
    const auto i = static_cast<Index>(t);
    rows.push_back({c, counts.total_pos(c), ld_report.per_class(i), rld_report.per_class(i), dcp_report.per_class(i)});
  }
  return rows;
}

MaterialisedSplit materialise(const SyntheticSpec& spec) {
  const FoldClassCounts counts = synthetic_counts(spec);
  const Index fold_size = spec.n / spec.k;
  std::vector<std::vector<ClassId>> rows(static_cast<std::size_t>(spec.n));
  for (Index c = 0; c < spec.q; ++c) {
    // Rotate each class's start so positives of different classes spread over the fold.
    const Index offset = (c * 7919) % fold_size;
    for (FoldId j = 0; j < spec.k; ++j) {
      for (Count t = 0; t < counts.pos(j, c); ++t) {
        const Index point = j * fold_size + (offset + t) % fold_size;
        rows[static_cast<std::size_t>(point)].push_back(static_cast<ClassId>(c));
      }
    }
  }
  std::vector<FoldId> assignment(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) assignment[static_cast<std::size_t>(i)] = static_cast<FoldId>(i / fold_size);
  return {LabelMatrix(spec.q, rows), FoldAssignment(spec.k, std::move(assignment))};
}

DatasetProfile bibtex_profile() { return {7395, 159, 0.0151, 51, 61, 82, 130, 1042}; }

std::vector<Count> profile_class_sizes(const DatasetProfile& p) {
  if (p.q < 5) throw Error("profile: need at least five classes");
  if (!(p.min <= p.p25 && p.p25 <= p.p50 && p.p50 <= p.p75 && p.p75 <= p.max)) {
    throw Error("profile: quantiles are not ordered");
  }
  auto rank_index = [&](double frac) { return static_cast<Index>(std::ceil(frac * static_cast<double>(p.q))) - 1; };
  const Index i25 = rank_index(0.25);
  const Index i50 = rank_index(0.50);
  const Index i75 = rank_index(0.75);
  const Index last = p.q - 1;

  std::vector<Count> sizes(static_cast<std::size_t>(p.q));
  auto linear = [&](Index a, Index b, Count va, Count vb) {
    for (Index i = a; i <= b; ++i) {
      const double t = b == a ? 0.0 : static_cast<double>(i - a) / static_cast<double>(b - a);
      sizes[static_cast<std::size_t>(i)] = std::llround(static_cast<double>(va) + t * static_cast<double>(vb - va));
    }
  };
  linear(0, i25, p.min, p.p25);
  linear(i25, i50, p.p25, p.p50);
  linear(i50, i75, p.p50, p.p75);

  // The upper tail follows p75 + (max - p75) t^gamma; gamma is fitted to the density.
  const double target = p.density * static_cast<double>(p.n) * static_cast<double>(p.q);
  const double head = std::accumulate(sizes.begin(), sizes.begin() + i75 + 1, 0.0);
  auto tail_sum = [&](double gamma) {
    double s = 0.0;
    for (Index i = i75 + 1; i <= last; ++i) {
      const double t = static_cast<double>(i - i75) / static_cast<double>(last - i75);
      s += static_cast<double>(p.p75) + static_cast<double>(p.max - p.p75) * std::pow(t, gamma);
    }
    return s;
  };
  double lo = 1e-3;
  double hi = 1e3;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (head + tail_sum(mid) > target ? lo : hi) = mid;
  }
  const double gamma = std::sqrt(lo * hi);
  for (Index i = i75 + 1; i <= last; ++i) {
    const double t = static_cast<double>(i - i75) / static_cast<double>(last - i75);
    sizes[static_cast<std::size_t>(i)] =
        std::llround(static_cast<double>(p.p75) + static_cast<double>(p.max - p.p75) * std::pow(t, gamma));
  }
  sizes[static_cast<std::size_t>(last)] = p.max;
  return sizes;
}

LabelMatrix surrogate_dataset(const DatasetProfile& profile, std::uint64_t seed, const SurrogateShape& shape) {
  std::vector<Count> sizes = profile_class_sizes(profile);
  if (sizes.back() >= profile.n) throw Error("profile: largest class must be smaller than n");
  if (shape.topics < 1 || shape.topic_boost <= 0.0) throw Error("surrogate: invalid shape");
  const Index n = profile.n;
  const Index q = profile.q;
  const int topics = shape.topics;

  std::mt19937_64 rng(seed);
  std::shuffle(sizes.begin(), sizes.end(), rng);

  std::lognormal_distribution<double> propensity_dist(0.0, shape.propensity_sigma);
  std::uniform_int_distribution<int> topic_dist(0, topics - 1);
  std::vector<double> propensity(static_cast<std::size_t>(n));
  std::vector<int> topic(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    propensity[static_cast<std::size_t>(i)] = propensity_dist(rng);
    topic[static_cast<std::size_t>(i)] = topic_dist(rng);
  }
  auto class_topic = [&](Index c) { return static_cast<int>(c % topics); };

  // Weighted sampling without replacement (Efraimidis-Spirakis keys).
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<ClassId>> rows(static_cast<std::size_t>(n));
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(q));
  std::vector<std::pair<double, Index>> keys(static_cast<std::size_t>(n));
  for (Index c = 0; c < q; ++c) {
    for (Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double w = propensity[ui] * (topic[ui] == class_topic(c) ? shape.topic_boost : 1.0);
      const double u = std::max(unit(rng), 1e-300);
      keys[ui] = {std::log(u) / w, i};
    }
    const auto take = static_cast<std::ptrdiff_t>(sizes[static_cast<std::size_t>(c)]);
    std::nth_element(keys.begin(), keys.begin() + take, keys.end(), std::greater<>());
    for (std::ptrdiff_t t = 0; t < take; ++t) {
      const Index point = keys[static_cast<std::size_t>(t)].second;
      rows[static_cast<std::size_t>(point)].push_back(static_cast<ClassId>(c));
      members[static_cast<std::size_t>(c)].push_back(point);
    }
  }

  // Label-free points take over a membership from a multi-label point, preferring
  // classes of their own topic, until no multi-label point is left. Class sizes
  // are unchanged.
  std::vector<Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), Index(0));
  for (Index p = 0; p < n; ++p) {
    auto& row = rows[static_cast<std::size_t>(p)];
    if (!row.empty()) continue;
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_partition(order.begin(), order.end(),
                          [&](Index c) { return class_topic(c) == topic[static_cast<std::size_t>(p)]; });
    bool placed = false;
    for (Index c : order) {
      auto& list = members[static_cast<std::size_t>(c)];
      const std::size_t start = std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng);
      for (std::size_t t = 0; t < list.size() && !placed; ++t) {
        Index& donor = list[(start + t) % list.size()];
        auto& donor_row = rows[static_cast<std::size_t>(donor)];
        if (donor_row.size() < 2) continue;
        std::erase(donor_row, static_cast<ClassId>(c));
        row.push_back(static_cast<ClassId>(c));
        donor = p;
        placed = true;
      }
      if (placed) break;
    }
    if (!placed) break;
  }
  for (auto& row : rows) std::sort(row.begin(), row.end());
  return LabelMatrix(q, rows);
}

}  // namespace stratkit
