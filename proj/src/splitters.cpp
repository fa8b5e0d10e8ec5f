#include "stratkit/splitters.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace stratkit {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::random: return "random";
    case Method::iterative: return "is";
    case Method::pmbsrs: return "pmbsrs";
    case Method::optisplit: return "optisplit";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "random") return Method::random;
  if (name == "is" || name == "iterative") return Method::iterative;
  if (name == "pmbsrs") return Method::pmbsrs;
  if (name == "optisplit") return Method::optisplit;
  if (name == "ss" || name == "sois") throw Error(fmt::format("{}: method not implemented; see docs", name));
  throw Error(fmt::format("unknown method '{}' (expected random, is, pmbsrs or optisplit)", name));
}

void SplitConfig::validate(Index n) const {
  if (k < 2) throw Error(fmt::format("k must be at least 2, got {}", k));
  if (k > n) throw Error(fmt::format("k = {} exceeds the number of data points ({})", k, n));
  if (max_epochs < 1) throw Error(fmt::format("max_epochs must be at least 1, got {}", max_epochs));
  if (balance_candidates < 1) {
    throw Error(fmt::format("balance_candidates must be at least 1, got {}", balance_candidates));
  }
  if (method == Method::optisplit && optimise_measure != Measure::rld && optimise_measure != Measure::dcp) {
    throw Error(fmt::format("optisplit can optimise rld or dcp, not {}", to_string(optimise_measure)));
  }
  if (init && (init->n() != n || init->k() != k)) {
    throw Error("initial fold assignment does not match the dataset size or k");
  }
}

namespace {

void check_fold_count(const LabelMatrix& labels, FoldId k) {
  if (k < 1) throw Error(fmt::format("k must be positive, got {}", k));
  if (k > labels.n()) throw Error(fmt::format("k = {} exceeds the number of data points ({})", k, labels.n()));
}

template <typename T>
T uniform_below(Rng& rng, T bound) {
  return std::uniform_int_distribution<T>(T(0), bound - 1)(rng);
}

// Uniformly random index among `candidates` (non-empty).
template <typename T>
T pick(Rng& rng, const std::vector<T>& candidates) {
  return candidates[uniform_below(rng, candidates.size())];
}

// Moves `count` uniformly drawn elements of `pool` (without replacement) to its front.
void partial_shuffle(std::vector<Index>& pool, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

FoldAssignment random_split(const LabelMatrix& labels, FoldId k, std::uint64_t seed) {
  check_fold_count(labels, k);
  const Index n = labels.n();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index(0));
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<FoldId> assignment(static_cast<std::size_t>(n));
  const Index base = n / k;
  const Index extra = n % k;
  std::size_t cursor = 0;
  for (FoldId f = 0; f < k; ++f) {
    const Index block = base + (f < extra ? 1 : 0);
    for (Index t = 0; t < block; ++t) assignment[static_cast<std::size_t>(perm[cursor++])] = f;
  }
  return FoldAssignment(k, std::move(assignment));
}

FoldAssignment iterative_stratification(const LabelMatrix& labels, FoldId k, std::uint64_t seed) {
  check_fold_count(labels, k);
  const Index n = labels.n();
  const Index q = labels.q();
  Rng rng(seed);

  // Real-valued desired counts, decremented as points are placed.
  std::vector<double> capacity(static_cast<std::size_t>(k), static_cast<double>(n) / k);
  Eigen::MatrixXd desired = (labels.class_sizes().cast<double>() / static_cast<double>(k)).replicate(1, k);
  CountVector remaining = labels.class_sizes();
  std::vector<FoldId> assignment(static_cast<std::size_t>(n), -1);
  std::vector<FoldId> ties;

  auto place = [&](Index point, FoldId f) {
    assignment[static_cast<std::size_t>(point)] = f;
    capacity[static_cast<std::size_t>(f)] -= 1.0;
    for (ClassId c : labels.row(point)) {
      desired(c, f) -= 1.0;
      --remaining(c);
    }
  };

  // Among `ties`, keep the folds with the largest remaining capacity, then pick randomly.
  auto by_capacity = [&]() {
    double best = -std::numeric_limits<double>::infinity();
    for (FoldId f : ties) best = std::max(best, capacity[static_cast<std::size_t>(f)]);
    std::erase_if(ties, [&](FoldId f) { return capacity[static_cast<std::size_t>(f)] != best; });
    return pick(rng, ties);
  };

  while (true) {
    ClassId label = -1;
    for (Index c = 0; c < q; ++c) {
      if (remaining(c) > 0 && (label < 0 || remaining(c) < remaining(label))) label = static_cast<ClassId>(c);
    }
    if (label < 0) break;

    for (Index point : labels.members(label)) {
      if (assignment[static_cast<std::size_t>(point)] >= 0) continue;
      const double best = desired.row(label).maxCoeff();
      ties.clear();
      for (FoldId f = 0; f < k; ++f) {
        if (desired(label, f) == best) ties.push_back(f);
      }
      place(point, by_capacity());
    }
  }

  // Label-free points fill whatever capacity is left.
  for (Index point = 0; point < n; ++point) {
    if (assignment[static_cast<std::size_t>(point)] >= 0) continue;
    ties.resize(static_cast<std::size_t>(k));
    std::iota(ties.begin(), ties.end(), FoldId(0));
    place(point, by_capacity());
  }
  return FoldAssignment(k, std::move(assignment));
}

double pmbsrs_log_score(const LabelMatrix& labels, Index point) {
  const double n = static_cast<double>(labels.n());
  double score = 0.0;
  for (ClassId c : labels.row(point)) score += std::log(static_cast<double>(labels.class_sizes()(c)) / n);
  return score;
}

FoldAssignment pmbsrs_split(const LabelMatrix& labels, FoldId k, std::uint64_t seed) {
  check_fold_count(labels, k);
  const Index n = labels.n();
  std::vector<double> score(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) score[static_cast<std::size_t>(i)] = pmbsrs_log_score(labels, i);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double sa = score[static_cast<std::size_t>(a)];
    const double sb = score[static_cast<std::size_t>(b)];
    return sa != sb ? sa < sb : a < b;
  });

  Rng rng(seed);
  std::vector<FoldId> assignment(static_cast<std::size_t>(n));
  const Index base = n / k;
  const Index extra = n % k;
  Index begin = 0;
  Index dealt = 0;  // the deal continues across strata so fold sizes differ by at most one
  for (FoldId s = 0; s < k; ++s) {
    const Index end = begin + base + (s < extra ? 1 : 0);
    std::shuffle(order.begin() + begin, order.begin() + end, rng);
    for (Index t = begin; t < end; ++t) {
      assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = static_cast<FoldId>(dealt++ % k);
    }
    begin = end;
  }
  return FoldAssignment(k, std::move(assignment));
}

namespace {

__extension__ using Wide = __int128;

}  // namespace

std::vector<Count> apportion(Count total, std::span<const Count> weights) {
  if (weights.empty()) throw Error("apportion: no bins");
  if (total < 0) throw Error("apportion: negative total");
  Count weight_sum = 0;
  for (Count w : weights) {
    if (w < 0) throw Error("apportion: negative weight");
    weight_sum += w;
  }
  if (weight_sum == 0) throw Error("apportion: zero total weight");

  std::vector<Count> seats(weights.size());
  std::vector<Count> remainder(weights.size());
  Count assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const Wide quota = static_cast<Wide>(total) * weights[j];
    seats[j] = static_cast<Count>(quota / weight_sum);
    remainder[j] = static_cast<Count>(quota % weight_sum);
    assigned += seats[j];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (Count r = 0; r < total - assigned; ++r) ++seats[order[static_cast<std::size_t>(r)]];
  return seats;
}

SplitState::SplitState(const LabelMatrix& labels, const FoldAssignment& folds)
    : labels_(&labels),
      counts_(build_counts(labels, folds)),
      assignment_(folds.data()),
      members_(static_cast<std::size_t>(folds.k())),
      slot_(static_cast<std::size_t>(labels.n())) {
  for (Index i = 0; i < labels.n(); ++i) {
    auto& list = members_[static_cast<std::size_t>(assignment_[static_cast<std::size_t>(i)])];
    slot_[static_cast<std::size_t>(i)] = static_cast<Index>(list.size());
    list.push_back(i);
  }
}

void SplitState::move(Index point, FoldId to) {
  const auto p = static_cast<std::size_t>(point);
  const FoldId from = assignment_[p];
  if (from == to) return;
  apply_move(counts_, labels_->row(point), from, to);

  auto& src = members_[static_cast<std::size_t>(from)];
  const Index last = src.back();
  src[static_cast<std::size_t>(slot_[p])] = last;
  slot_[static_cast<std::size_t>(last)] = slot_[p];
  src.pop_back();

  auto& dst = members_[static_cast<std::size_t>(to)];
  slot_[p] = static_cast<Index>(dst.size());
  dst.push_back(point);
  assignment_[p] = to;
}

FoldAssignment SplitState::assignment() const { return FoldAssignment(counts_.k, assignment_); }

namespace {

// Up to `count` distinct points of `fold`, drawn uniformly, whose membership in
// `cls` equals `positive`.
std::vector<Index> draw_from_fold(const SplitState& state, FoldId fold, ClassId cls, bool positive, Count count,
                                  Rng& rng) {
  std::vector<Index> picked;
  if (count <= 0) return picked;
  const LabelMatrix& labels = state.labels();

  if (positive) {
    std::vector<Index> pool;
    for (Index p : labels.members(cls)) {
      if (state.fold_of(p) == fold) pool.push_back(p);
    }
    const auto take = std::min(pool.size(), static_cast<std::size_t>(count));
    partial_shuffle(pool, take, rng);
    pool.resize(take);
    return pool;
  }

  // Negatives are usually the bulk of a fold: rejection-sample, and fall back to
  // enumerating the fold if the class turns out to dominate it.
  const auto members = state.fold_members(fold);
  std::unordered_set<Index> taken;
  const Count budget = 8 * count + 64;
  for (Count tries = 0; tries < budget && static_cast<Count>(picked.size()) < count; ++tries) {
    const Index p = members[uniform_below(rng, members.size())];
    if (labels.has_label(p, cls) || taken.contains(p)) continue;
    taken.insert(p);
    picked.push_back(p);
  }
  if (static_cast<Count>(picked.size()) < count) {
    std::vector<Index> pool;
    for (Index p : members) {
      if (!labels.has_label(p, cls) && !taken.contains(p)) pool.push_back(p);
    }
    const auto missing = std::min(pool.size(), static_cast<std::size_t>(count) - picked.size());
    partial_shuffle(pool, missing, rng);
    picked.insert(picked.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(missing));
  }
  return picked;
}

struct Collateral {
  double loss = 0.0;       // change in the summed per-class measure
  double deviation = 0.0;  // change in sum |pos(j, B) - |D^B| |S_j| / |D||

  auto operator<=>(const Collateral&) const = default;
};

// Effect on the point's other classes of moving it `from` -> `to`.
Collateral collateral_cost(const SplitState& state, Index point, ClassId cls, FoldId from, FoldId to, Measure measure) {
  const FoldClassCounts& counts = state.counts();
  const double n = static_cast<double>(counts.n_total);
  const double from_size = static_cast<double>(counts.fold_sizes(from));
  const double to_size = static_cast<double>(counts.fold_sizes(to));
  Collateral cost;
  CountVector column(counts.k);
  for (ClassId b : state.labels().row(point)) {
    const Count total = counts.total_pos(b);
    if (b == cls || total >= counts.n_total) continue;
    const double d = static_cast<double>(total) / n;
    const double dev_from = static_cast<double>(counts.pos(from, b)) - d * from_size;
    const double dev_to = static_cast<double>(counts.pos(to, b)) - d * to_size;
    cost.deviation += std::abs(dev_from - 1.0) - std::abs(dev_from) + std::abs(dev_to + 1.0) - std::abs(dev_to);

    column = counts.pos.col(b);
    const double before = kernel::class_score<double>(measure, column, counts.fold_sizes, total, counts.n_total);
    --column(from);
    ++column(to);
    cost.loss += kernel::class_score<double>(measure, column, counts.fold_sizes, total, counts.n_total) - before;
  }
  return cost;
}

}  // namespace

std::vector<Move> balance(SplitState& state, ClassId cls, Rng& rng, Measure measure, Count candidates) {
  if (candidates < 1) throw Error("balance: candidates must be at least 1");
  const FoldClassCounts& counts = state.counts();
  if (!counts.is_retained(cls)) throw Error(fmt::format("balance: class {} is excluded or out of range", cls));

  const Count total = counts.total_pos(cls);
  const bool by_negatives = total > counts.n_total - total;
  const auto k = static_cast<std::size_t>(counts.k);

  std::vector<Count> sizes(k);
  std::vector<Count> current(k);
  for (std::size_t j = 0; j < k; ++j) {
    sizes[j] = counts.fold_sizes(static_cast<Index>(j));
    const Count pos = counts.pos(static_cast<Index>(j), cls);
    current[j] = by_negatives ? sizes[j] - pos : pos;
  }
  const std::vector<Count> target = apportion(by_negatives ? counts.n_total - total : total, sizes);

  // Points of the apportioned kind leave surplus folds; each is exchanged for a
  // point of the other kind from the receiving fold. Both sides are the best of
  // a few uniform candidates by their effect on the point's other classes.
  const bool outgoing_positive = !by_negatives;
  std::vector<std::vector<Index>> pool(k);
  std::vector<FoldId> surplus;
  std::vector<FoldId> deficit;
  for (std::size_t j = 0; j < k; ++j) {
    const auto f = static_cast<FoldId>(j);
    if (current[j] > target[j]) {
      surplus.push_back(f);
      pool[j] = draw_from_fold(state, f, cls, outgoing_positive, (current[j] - target[j]) * candidates, rng);
    } else if (current[j] < target[j]) {
      deficit.push_back(f);
    }
  }

  auto cheapest = [&](std::span<const Index> options, FoldId from, FoldId to) {
    std::size_t best_at = 0;
    Collateral best = collateral_cost(state, options[0], cls, from, to, measure);
    for (std::size_t c = 1; c < options.size(); ++c) {
      const Collateral cost = collateral_cost(state, options[c], cls, from, to, measure);
      if (cost < best) {
        best = cost;
        best_at = c;
      }
    }
    return best_at;
  };

  std::vector<Move> moves;
  std::size_t si = 0;
  std::size_t di = 0;
  std::size_t used = 0;
  while (si < surplus.size() && di < deficit.size()) {
    const FoldId s = surplus[si];
    const FoldId d = deficit[di];
    const auto su = static_cast<std::size_t>(s);
    const auto du = static_cast<std::size_t>(d);
    auto& out = pool[su];

    const std::span<Index> window(out.data() + used, std::min(out.size() - used, static_cast<std::size_t>(candidates)));
    std::swap(window[0], window[cheapest(window, s, d)]);
    const Index a = out[used++];
    state.move(a, d);
    moves.push_back({a, s, d});

    const std::vector<Index> partners = draw_from_fold(state, d, cls, !outgoing_positive, candidates, rng);
    const Index b = partners[cheapest(partners, d, s)];
    state.move(b, s);
    moves.push_back({b, d, s});

    if (--current[su] == target[su]) {
      ++si;
      used = 0;
    }
    if (++current[du] == target[du]) ++di;
  }
  return moves;
}

void undo(SplitState& state, std::span<const Move> moves) {
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) state.move(it->point, it->from);
}

OptisplitResult optisplit(const LabelMatrix& labels, const SplitConfig& config) {
  config.validate(labels.n());
  const FoldAssignment initial = config.init ? *config.init : random_split(labels, config.k, config.seed);
  SplitState state(labels, initial);
  const FoldClassCounts& counts = state.counts();
  if (counts.retained_classes.empty()) {
    throw Error("optisplit: no class has both positive and negative data points");
  }

  const Measure measure = config.optimise_measure;
  const auto q = static_cast<std::size_t>(labels.q());
  std::vector<char> retained(q, 0);
  for (ClassId c : counts.retained_classes) retained[static_cast<std::size_t>(c)] = 1;

  auto class_loss = [&](ClassId c) {
    return kernel::class_score<double>(measure, counts.pos.col(c), counts.fold_sizes, counts.total_pos(c),
                                       counts.n_total);
  };
  std::vector<double> loss_of(q, 0.0);
  auto full_loss = [&] {
    double sum = 0.0;
    for (ClassId c : counts.retained_classes) {
      loss_of[static_cast<std::size_t>(c)] = class_loss(c);
      sum += loss_of[static_cast<std::size_t>(c)];
    }
    return sum;
  };

  OptimisationTrace trace;
  double loss = full_loss();
  trace.initial_loss = loss;

  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::uint64_t> stamp(q, 0);
  std::uint64_t generation = 0;
  std::vector<ClassId> touched;
  std::vector<double> fresh;
  std::vector<ClassId> order = counts.retained_classes;

  for (int epoch = 1;; ++epoch) {
    // Visit classes worst-first; the order is frozen for the epoch.
    std::sort(order.begin(), order.end(), [&](ClassId a, ClassId b) {
      const double la = loss_of[static_cast<std::size_t>(a)];
      const double lb = loss_of[static_cast<std::size_t>(b)];
      return la != lb ? la > lb : a < b;
    });

    Index accepted = 0;
    for (ClassId cls : order) {
      ++trace.balance_calls;
      const std::vector<Move> moves = balance(state, cls, rng, measure, config.balance_candidates);
      if (moves.empty()) {
        ++trace.skips;
        continue;
      }

      // Fold sizes are unchanged by balance, so only classes on moved points need rescoring.
      ++generation;
      touched.clear();
      for (const Move& mv : moves) {
        for (ClassId c : labels.row(mv.point)) {
          const auto ci = static_cast<std::size_t>(c);
          if (retained[ci] && stamp[ci] != generation) {
            stamp[ci] = generation;
            touched.push_back(c);
          }
        }
      }
      fresh.resize(touched.size());
      double delta = 0.0;
      for (std::size_t t = 0; t < touched.size(); ++t) {
        fresh[t] = class_loss(touched[t]);
        delta += fresh[t] - loss_of[static_cast<std::size_t>(touched[t])];
      }

      if (delta < -1e-12 * std::max(1.0, loss)) {
        for (std::size_t t = 0; t < touched.size(); ++t) loss_of[static_cast<std::size_t>(touched[t])] = fresh[t];
        loss += delta;
        ++accepted;
        trace.accepted_losses.push_back(loss);
      } else {
        undo(state, moves);
        ++trace.skips;
      }
    }

    // Full recomputation guards the incremental bookkeeping against drift.
    const double exact = full_loss();
    if (std::abs(exact - loss) > 1e-9 * std::max(1.0, std::abs(exact))) {
      throw Error(fmt::format("optisplit: incremental loss {} drifted from recomputed loss {}", loss, exact));
    }
    loss = exact;
    trace.epoch_losses.push_back(loss);
    trace.accepted_per_epoch.push_back(accepted);
    if (accepted == 0) {
      trace.reason = Termination::converged;
      break;
    }
    if (epoch >= config.max_epochs) {
      trace.reason = Termination::max_epochs;
      break;
    }
  }
  return {state.assignment(), std::move(trace)};
}

FoldAssignment make_split(const LabelMatrix& labels, const SplitConfig& config) {
  config.validate(labels.n());
  switch (config.method) {
    case Method::random: return random_split(labels, config.k, config.seed);
    case Method::iterative: return iterative_stratification(labels, config.k, config.seed);
    case Method::pmbsrs: return pmbsrs_split(labels, config.k, config.seed);
    case Method::optisplit: return optisplit(labels, config).folds;
  }
  throw Error("unknown split method");
}

TrainTestSplit train_test_split(const LabelMatrix& labels, double test_fraction, const SplitConfig& config) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(fmt::format("test fraction must lie in (0, 1), got {}", test_fraction));
  }
  const auto folds = static_cast<FoldId>(std::llround(1.0 / test_fraction));
  if (folds < 2) throw Error(fmt::format("test fraction {} rounds to fewer than two folds", test_fraction));

  SplitConfig cfg = config;
  cfg.k = folds;
  cfg.init.reset();
  const FoldAssignment assignment = make_split(labels, cfg);

  TrainTestSplit split;
  for (Index i = 0; i < labels.n(); ++i) {
    (assignment[i] == folds - 1 ? split.test : split.train).push_back(i);
  }
  return split;
}

}  // namespace stratkit
