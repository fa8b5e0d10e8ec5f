#pragma once

#include "stratkit/core.hpp"
#include "stratkit/measures.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace stratkit {

enum class Method { random, iterative, pmbsrs, optisplit };

std::string_view to_string(Method m);

/// Accepts "random", "is", "pmbsrs", "optisplit". "ss" and "sois" are recognised
/// but rejected as not implemented.
Method parse_method(std::string_view name);

struct SplitConfig {
  Method method = Method::optisplit;
  FoldId k = 5;
  std::uint64_t seed = 0;
  Measure optimise_measure = Measure::rld;  // optisplit only; rld or dcp
  int max_epochs = 20;                      // optisplit only
  Count balance_candidates = 8;             // optisplit only; 1 draws moved points purely uniformly
  std::optional<FoldAssignment> init;       // optisplit only; random split when empty

  /// Throws Error unless 2 <= k <= n, max_epochs >= 1, balance_candidates >= 1 and
  /// the measure is optimisable.
  void validate(Index n) const;
};

using Rng = std::mt19937_64;

FoldAssignment random_split(const LabelMatrix& labels, FoldId k, std::uint64_t seed);
FoldAssignment iterative_stratification(const LabelMatrix& labels, FoldId k, std::uint64_t seed);
FoldAssignment pmbsrs_split(const LabelMatrix& labels, FoldId k, std::uint64_t seed);

/// Log of the PMBSRS similarity score: sum of log(|D^i| / n) over the point's labels.
double pmbsrs_log_score(const LabelMatrix& labels, Index point);

/**
 * Largest-remainder apportionment of `total` units over bins with integer
 * `weights`. Quotas are total * w_j / sum(w); the leftover units go to the
 * largest fractional remainders, ties to the lower bin index. Exact in integers.
 */
std::vector<Count> apportion(Count total, std::span<const Count> weights);

/**
 * Mutable split under optimisation: the assignment, its fold/class counts and a
 * per-fold member list so that random members of a fold can be drawn in O(1).
 */
class SplitState {
 public:
  SplitState(const LabelMatrix& labels, const FoldAssignment& folds);

  const LabelMatrix& labels() const { return *labels_; }
  const FoldClassCounts& counts() const { return counts_; }
  FoldId fold_of(Index point) const { return assignment_[static_cast<std::size_t>(point)]; }
  std::span<const Index> fold_members(FoldId fold) const { return members_[static_cast<std::size_t>(fold)]; }

  void move(Index point, FoldId to);
  FoldAssignment assignment() const;

 private:
  const LabelMatrix* labels_;
  FoldClassCounts counts_;
  std::vector<FoldId> assignment_;
  std::vector<std::vector<Index>> members_;
  std::vector<Index> slot_;  // position of each point inside its fold's member list
};

struct Move {
  Index point;
  FoldId from;
  FoldId to;
};

/**
 * Rebalances one class so that its per-fold positive counts equal the
 * largest-remainder apportionment of |D^A| proportional to the current fold
 * sizes. Each point sent from a surplus fold to a deficit fold is exchanged for
 * a point of the opposite kind drawn from the deficit fold, so fold sizes stay
 * fixed. When the class has more positives than negatives the roles swap and
 * the negatives are apportioned instead. The moved point and its partner are
 * each the best of `candidates` uniformly drawn points: the one whose move hurts
 * the point's other classes least under `measure`, with ties going to the
 * smaller change in absolute count deviation. With one candidate the choice is
 * plain uniform sampling.
 *
 * Returns the moves applied, in order; replaying them reversed undoes the call.
 */
std::vector<Move> balance(SplitState& state, ClassId cls, Rng& rng, Measure measure = Measure::rld,
                          Count candidates = 8);

/// Reverts `moves` as returned by balance().
void undo(SplitState& state, std::span<const Move> moves);

enum class Termination { converged, max_epochs };

struct OptimisationTrace {
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;        // global loss at the end of each epoch
  std::vector<double> accepted_losses;     // global loss after every accepted balance
  std::vector<Index> accepted_per_epoch;
  Index skips = 0;                         // rejected balances (cursor advanced past the class)
  Index balance_calls = 0;
  Termination reason = Termination::converged;
};

struct OptisplitResult {
  FoldAssignment folds;
  OptimisationTrace trace;
};

/// Greedy hill-climbing over per-class balance operations; only balances that
/// strictly lower the summed per-class loss are kept.
OptisplitResult optisplit(const LabelMatrix& labels, const SplitConfig& config);

/// Runs the configured method.
FoldAssignment make_split(const LabelMatrix& labels, const SplitConfig& config);

struct TrainTestSplit {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Generates round(1 / test_fraction) folds with `config.method` and uses the
/// last fold as the test set. `config.k` is ignored.
TrainTestSplit train_test_split(const LabelMatrix& labels, double test_fraction, const SplitConfig& config);

}  // namespace stratkit
