#pragma once

#include "stratkit/io.hpp"
#include "stratkit/splitters.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratkit::cli {

/// A named method as it appears in reports, e.g. "optisplit_rld".
struct MethodSpec {
  std::string name;
  SplitConfig config;
};

/// Accepts the core method names plus "optisplit_rld" / "optisplit_dcp". A bare
/// "optisplit" takes its measure from `base`.
MethodSpec parse_method_spec(std::string_view token, const SplitConfig& base);

struct BenchPlan {
  std::vector<std::filesystem::path> datasets;
  std::vector<std::string> methods{"random", "is", "pmbsrs", "optisplit_rld", "optisplit_dcp"};
  FoldId k = 5;
  std::uint64_t base_seed = 0;
  int seeds = 10;  // runs use base_seed, base_seed + 1, ...
  int max_epochs = 20;
  Count balance_candidates = 8;
  io::LabelFormat format = io::LabelFormat::label_list;

  void validate() const;
};

struct BenchResult {
  std::vector<io::ReportRow> rows;
  bool all_ok = true;
};

/// Runs every (dataset, method, seed) cell on up to `threads` workers. Rows come
/// back in plan order with a "mean" row closing each (dataset, method) group.
BenchResult run_bench(const BenchPlan& plan, unsigned threads);

/// Worker count from STRATKIT_THREADS, else the hardware concurrency.
unsigned thread_budget();

/// Entry point shared by the executable and the tests. `args` excludes the program
/// name. Returns 0 on success, 1 on error, 2 when a bench finished with failed cells.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stratkit::cli
