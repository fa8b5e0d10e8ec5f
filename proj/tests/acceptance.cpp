// Acceptance checks. Prints one PASS/FAIL line per criterion (details indented
// below it) and exits nonzero if any criterion fails.
//
// Usage: acceptance [bibtex-label-list]
// Without a path (or STRATKIT_BIBTEX), the seeded bibtex surrogate is used.

#include "stratkit/io.hpp"
#include "stratkit/measures.hpp"
#include "stratkit/splitters.hpp"
#include "stratkit/synthetic.hpp"

#include <fmt/core.h>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace stratkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Criterion {
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    if (!ok) pass = false;
    if (!ok || notes.size() < 12) notes.push_back((ok ? "ok   " : "FAIL ") + std::move(note));
  }
};

LabelMatrix random_labels(Index n, Index q, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution on(density);
  std::vector<std::vector<ClassId>> rows(static_cast<std::size_t>(n));
  for (auto& row : rows) {
    for (ClassId c = 0; c < q; ++c) {
      if (on(rng)) row.push_back(c);
    }
  }
  return LabelMatrix(q, rows);
}

FoldAssignment random_folds(Index n, FoldId k, std::mt19937_64& rng) {
  std::vector<FoldId> a(static_cast<std::size_t>(n));
  std::uniform_int_distribution<FoldId> fold(0, k - 1);
  for (Index i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = i < k ? static_cast<FoldId>(i) : fold(rng);
  std::shuffle(a.begin(), a.end(), rng);
  return FoldAssignment(k, std::move(a));
}

// Hamilton apportionment straight from its definition, in exact integers.
std::vector<Count> hamilton(Count total, const std::vector<Count>& weights) {
  const Count sum = std::accumulate(weights.begin(), weights.end(), Count{0});
  std::vector<Count> seats(weights.size());
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t j = 0; j < weights.size(); ++j) seats[j] = total * weights[j] / sum;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return total * weights[a] % sum > total * weights[b] % sum;
  });
  Count left = total - std::accumulate(seats.begin(), seats.end(), Count{0});
  for (std::size_t t = 0; left > 0; ++t, --left) ++seats[order[t]];
  return seats;
}

Criterion measure_oracles() {
  Criterion c{"measure oracles (pos [1,3], fold sizes [4,4]: rld 0.5, dcp 0.25, ld 4/3, tol 1e-9)"};
  const auto counts = FoldClassCounts::from_counts((CountMatrix(2, 1) << 1, 3).finished(),
                                                   (CountVector(2) << 4, 4).finished());
  const double r = rld(counts).aggregate, d = dcp(counts).aggregate, l = ld(counts).aggregate;
  c.check(std::abs(r - 0.5) <= 1e-9, fmt::format("rld = {}", r));
  c.check(std::abs(d - 0.25) <= 1e-9, fmt::format("dcp = {}", d));
  c.check(std::abs(l - 4.0 / 3.0) <= 1e-9, fmt::format("ld = {}", l));
  return c;
}

Criterion synthetic_patterns() {
  Criterion c{"synthetic fold patterns (n=100000, q=100, k=10; per-class rld/dcp flat within 0.005, ld increasing)"};
  const auto start = Clock::now();

  const auto diff = synthetic_report(SyntheticSpec{.scenario = Scenario::difference});
  const auto miss = synthetic_report(SyntheticSpec{.scenario = Scenario::one_missing});

  auto band = [&](const std::vector<SyntheticRow>& rows, const char* scenario, const char* what, double target,
                  double SyntheticRow::*field) {
    std::vector<std::string> off;
    double worst = 0.0;
    for (const auto& row : rows) {
      const double v = row.*field;
      worst = std::max(worst, std::abs(v - target));
      if (std::abs(v - target) > 0.005) off.push_back(fmt::format("class {} (size {}): {:.6f}", row.class_index, row.class_size, v));
    }
    std::string detail = off.empty() ? "" : " outside: " + fmt::format("{}", fmt::join(off, "; "));
    c.check(off.empty(), fmt::format("{} {} = {:.6f} +- 0.005 for all {} classes (max deviation {:.6f}){}", scenario,
                                     what, target, rows.size(), worst, detail));
  };
  band(diff, "difference", "rld", 0.04, &SyntheticRow::rld);
  band(diff, "difference", "dcp", 0.02, &SyntheticRow::dcp);
  band(miss, "one_missing", "rld", 0.2, &SyntheticRow::rld);
  band(miss, "one_missing", "dcp", 1.0 / 90.0, &SyntheticRow::dcp);

  bool increasing = true;
  for (std::size_t t = 1; t < diff.size(); ++t) increasing &= diff[t].ld > diff[t - 1].ld;
  c.check(increasing, "difference ld strictly increasing with class size");

  const double elapsed = seconds_since(start);
  c.check(elapsed < 5.0, fmt::format("runtime {:.3f} s < 5 s", elapsed));
  return c;
}

struct Dataset {
  LabelMatrix labels;
  std::string source;
};

Dataset bibtex(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : "";
  if (path.empty()) {
    if (const char* env = std::getenv("STRATKIT_BIBTEX")) path = env;
  }
  if (!path.empty() && std::filesystem::exists(path)) return {io::read_labels(path), path};
  return {surrogate_dataset(bibtex_profile(), 1), "seeded surrogate (seed 1)"};
}

Criterion benchmark(const Dataset& data) {
  Criterion c{fmt::format("bibtex benchmark, 10 seeds, k=5 [{}]", data.source)};
  struct Run {
    const char* name;
    Method method;
    Measure measure;
    Evaluation mean;
    double max_runtime = 0.0;
  };
  std::vector<Run> runs{{"random", Method::random, Measure::rld, {}},
                        {"is", Method::iterative, Measure::rld, {}},
                        {"pmbsrs", Method::pmbsrs, Measure::rld, {}},
                        {"optisplit_rld", Method::optisplit, Measure::rld, {}},
                        {"optisplit_dcp", Method::optisplit, Measure::dcp, {}}};
  for (auto& run : runs) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SplitConfig config;
      config.method = run.method;
      config.optimise_measure = run.measure;
      config.seed = seed;
      const auto start = Clock::now();
      const FoldAssignment folds = make_split(data.labels, config);
      run.max_runtime = std::max(run.max_runtime, seconds_since(start));
      const Evaluation e = evaluate_all(data.labels, folds);
      run.mean.ed += e.ed / 10;
      run.mean.ld += e.ld / 10;
      run.mean.dcp += e.dcp / 10;
      run.mean.rld += e.rld / 10;
    }
    c.notes.push_back(fmt::format("     {:<14} ed {:8.3f}  ld {:.4f}  dcp {:.4f}  rld {:.4f}  max runtime {:.3f} s", run.name,
                                  run.mean.ed, run.mean.ld, run.mean.dcp, run.mean.rld, run.max_runtime));
  }
  const Run& rnd = runs[0];
  const Run& is = runs[1];
  const Run& pm = runs[2];
  const Run& o_rld = runs[3];
  const Run& o_dcp = runs[4];
  c.check(o_rld.mean.rld <= 0.4 * rnd.mean.rld,
          fmt::format("rld(optisplit_rld) {:.4f} <= 0.4 x rld(random) {:.4f} (ratio {:.1f}x)", o_rld.mean.rld,
                      0.4 * rnd.mean.rld, rnd.mean.rld / o_rld.mean.rld));
  c.check(o_dcp.mean.dcp < is.mean.dcp,
          fmt::format("dcp(optisplit_dcp) {:.5f} < dcp(is) {:.5f}", o_dcp.mean.dcp, is.mean.dcp));
  c.check(std::abs(pm.mean.rld - rnd.mean.rld) <= 0.1 * rnd.mean.rld,
          fmt::format("rld(pmbsrs) {:.4f} within 10% of rld(random) {:.4f}", pm.mean.rld, rnd.mean.rld));
  const double slowest = std::max(o_rld.max_runtime, o_dcp.max_runtime);
  c.check(slowest < 60.0, fmt::format("slowest optisplit run {:.3f} s < 60 s", slowest));
  return c;
}

Criterion optimisation_invariants() {
  Criterion c{"optimisation invariants (50 random instances, n <= 200, q <= 20, k in {2,3,5}; [4,0] reaches 0)"};
  std::mt19937_64 rng(2024);
  int done = 0;
  while (done < 50) {
    const Index n = std::uniform_int_distribution<Index>(10, 200)(rng);
    const Index q = std::uniform_int_distribution<Index>(1, 20)(rng);
    const FoldId k = std::vector<FoldId>{2, 3, 5}[static_cast<std::size_t>(done % 3)];
    const LabelMatrix labels = random_labels(n, q, std::uniform_real_distribution<double>(0.02, 0.5)(rng), rng);
    if (build_counts(labels, random_folds(n, k, rng)).retained_classes.empty()) continue;

    SplitConfig config;
    config.k = k;
    config.seed = rng();
    config.optimise_measure = done % 2 ? Measure::dcp : Measure::rld;
    const auto result = optisplit(labels, config);
    const auto& t = result.trace;

    bool accepted_ok = true;
    double prev = t.initial_loss;
    for (double l : t.accepted_losses) {
      accepted_ok &= l < prev;
      prev = l;
    }
    bool epochs_ok = true;
    prev = t.initial_loss;
    for (double l : t.epoch_losses) {
      epochs_ok &= l <= prev;
      prev = l;
    }
    const auto counts = build_counts(labels, result.folds);
    double final_loss = 0.0;
    for (ClassId cls : counts.retained_classes) final_loss += per_class_score(config.optimise_measure, counts, cls);
    const bool partition = result.folds.n() == n && result.folds.k() == k && counts.fold_sizes.minCoeff() > 0 &&
                           counts.fold_sizes.sum() == n;
    c.check(accepted_ok && epochs_ok && final_loss <= t.initial_loss + 1e-12 && partition,
            fmt::format("instance {:2d}: n={} q={} k={} {} loss {:.5f} -> {:.5f}, {} accepted", done, n, q, k,
                        to_string(config.optimise_measure), t.initial_loss, final_loss, t.accepted_losses.size()));
    ++done;
  }

  const LabelMatrix skew(1, {{0}, {0}, {0}, {0}, {}, {}, {}, {}});
  SplitConfig config;
  config.k = 2;
  config.init = FoldAssignment(2, {0, 0, 0, 0, 1, 1, 1, 1});
  const auto result = optisplit(skew, config);
  const double score = per_class_score(Measure::rld, build_counts(skew, result.folds), 0);
  c.check(score == 0.0, fmt::format("[4,0] instance: final per-class rld = {}", score));
  return c;
}

Criterion balance_exactness() {
  Criterion c{"balance exactness (100 random instances against an independent apportionment)"};
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const FoldId k = std::uniform_int_distribution<FoldId>(2, 8)(rng);
    const Index n = std::uniform_int_distribution<Index>(4 * k, 400)(rng);
    const LabelMatrix labels = random_labels(n, 3, std::uniform_real_distribution<double>(0.03, 0.97)(rng), rng);
    const FoldAssignment folds = random_folds(n, k, rng);
    SplitState state(labels, folds);
    if (state.counts().retained_classes.empty()) {
      --trial;
      continue;
    }
    const ClassId cls = state.counts().retained_classes.front();
    Rng balance_rng(static_cast<std::uint64_t>(trial));
    balance(state, cls, balance_rng);

    const auto& counts = state.counts();
    const Count total = counts.total_pos(cls);
    const bool by_negatives = total > n - total;
    const std::vector<Count> sizes(counts.fold_sizes.data(), counts.fold_sizes.data() + k);
    const auto target = hamilton(by_negatives ? n - total : total, sizes);
    std::vector<Count> got(static_cast<std::size_t>(k));
    for (FoldId j = 0; j < k; ++j) {
      got[static_cast<std::size_t>(j)] = by_negatives ? counts.fold_sizes(j) - counts.pos(j, cls) : counts.pos(j, cls);
    }
    const bool consistent = counts == build_counts(labels, state.assignment());
    c.check(got == target && consistent,
            fmt::format("instance {:3d}: k={} n={} |D^A|={}{} -> [{}] target [{}]", trial, k, n, total,
                        by_negatives ? " (negatives)" : "", fmt::join(got, ","), fmt::join(target, ",")));
  }
  return c;
}

Criterion dataset_statistics(const Dataset& data) {
  Criterion c{fmt::format("bibtex dataset statistics [{}]", data.source)};
  const io::DatasetStats s = io::dataset_stats(data.labels);
  c.check(s.n == 7395, fmt::format("n = {}", s.n));
  c.check(s.q == 159, fmt::format("labels = {}", s.q));
  c.check(s.min == 51, fmt::format("min = {}", s.min));
  c.check(s.max == 1042, fmt::format("max = {}", s.max));
  c.check(std::abs(s.density - 0.0151) <= 0.0001, fmt::format("density = {:.6f} (0.0151 +- 0.0001)", s.density));

  std::vector<Count> sizes;
  for (Index cls = 0; cls < data.labels.q(); ++cls) {
    const Count size = data.labels.class_sizes()(cls);
    if (size > 0 && size < data.labels.n()) sizes.push_back(size);
  }
  std::sort(sizes.begin(), sizes.end());
  const auto q = static_cast<double>(sizes.size());
  for (auto [p, expected] : {std::pair{0.25, Count{61}}, std::pair{0.50, Count{82}}, std::pair{0.75, Count{130}}}) {
    const auto rank = static_cast<std::size_t>(std::ceil(p * q));  // 1-based nearest rank
    bool near = false;
    for (std::size_t r = std::max<std::size_t>(rank, 2) - 1; r <= std::min(rank + 1, sizes.size()); ++r) {
      near |= sizes[r - 1] == expected;
    }
    c.check(near, fmt::format("p{:.0f} = {} (expected {} within +-1 rank)", p * 100, sizes[rank - 1], expected));
  }
  return c;
}

Criterion round_trips() {
  Criterion c{"format round-trips (100 random label matrices and fold assignments)"};
  std::mt19937_64 rng(31337);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(1, 120)(rng);
    const Index q = std::uniform_int_distribution<Index>(1, 30)(rng);
    const LabelMatrix labels = random_labels(n, q, std::uniform_real_distribution<double>(0.0, 0.6)(rng), rng);
    std::stringstream lbuf;
    io::write_labels(lbuf, labels);
    const bool labels_ok = io::parse_labels(lbuf) == labels;

    const FoldId k = std::uniform_int_distribution<FoldId>(1, static_cast<FoldId>(std::min<Index>(n, 10)))(rng);
    const FoldAssignment folds = random_folds(n, k, rng);
    std::stringstream fbuf;
    io::write_folds(fbuf, folds);
    const bool folds_ok = io::parse_folds(fbuf, n, k) == folds;
    if (!labels_ok || !folds_ok) {
      ++failures;
      c.check(false, fmt::format("instance {}: labels {} folds {}", trial, labels_ok, folds_ok));
    }
  }
  c.check(failures == 0, fmt::format("{} of 100 instances round-tripped exactly", 100 - failures));
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const Dataset data = bibtex(argc, argv);
  const std::vector<std::function<Criterion()>> criteria{
      measure_oracles,
      synthetic_patterns,
      [&] { return benchmark(data); },
      optimisation_invariants,
      balance_exactness,
      [&] { return dataset_statistics(data); },
      round_trips,
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.pass = false;
      c.notes.push_back(fmt::format("FAIL exception: {}", e.what()));
    }
    failed += !c.pass;
    fmt::print("{} [{}] {}\n", c.pass ? "PASS" : "FAIL", i + 1, c.name);
    for (const auto& note : c.notes) fmt::print("       {}\n", note);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
