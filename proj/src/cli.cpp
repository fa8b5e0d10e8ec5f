#include "stratkit/cli.hpp"

#include "stratkit/measures.hpp"
#include "stratkit/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace stratkit::cli {

MethodSpec parse_method_spec(std::string_view token, const SplitConfig& base) {
  MethodSpec spec{std::string(token), base};
  spec.config.init.reset();
  if (token.starts_with("optisplit_")) {
    spec.config.method = Method::optisplit;
    spec.config.optimise_measure = parse_measure(token.substr(std::string_view("optisplit_").size()));
    return spec;
  }
  spec.config.method = parse_method(token);
  if (spec.config.method == Method::optisplit) {
    spec.name = fmt::format("optisplit_{}", to_string(base.optimise_measure));
  } else {
    spec.name = std::string(to_string(spec.config.method));
  }
  return spec;
}

void BenchPlan::validate() const {
  if (datasets.empty()) throw Error("bench: no datasets given");
  if (methods.empty()) throw Error("bench: no methods given");
  if (seeds < 1) throw Error("bench: need at least one seed");
  if (k < 2) throw Error("bench: k must be at least 2");
  if (max_epochs < 1) throw Error("bench: max_epochs must be at least 1");
  if (balance_candidates < 1) throw Error("bench: balance_candidates must be at least 1");
}

unsigned thread_budget() {
  if (const char* env = std::getenv("STRATKIT_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) return static_cast<unsigned>(requested);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Cell {
  std::size_t dataset;
  std::size_t method;
  int seed_index;
};

io::ReportRow mean_row(const std::string& dataset, const std::string& method, const std::vector<io::ReportRow>& runs) {
  io::ReportRow mean{dataset, method, "mean", std::nullopt, 0.0, {}};
  Evaluation sum;
  int ok = 0;
  for (const auto& r : runs) {
    if (!r.scores) continue;
    sum.ed += r.scores->ed;
    sum.ld += r.scores->ld;
    sum.dcp += r.scores->dcp;
    sum.rld += r.scores->rld;
    mean.runtime_s += r.runtime_s;
    ++ok;
  }
  if (ok == 0) {
    mean.error = "no successful runs";
    return mean;
  }
  mean.scores = Evaluation{sum.ed / ok, sum.ld / ok, sum.dcp / ok, sum.rld / ok};
  mean.runtime_s /= ok;
  return mean;
}

}  // namespace

BenchResult run_bench(const BenchPlan& plan, unsigned threads) {
  plan.validate();
  std::vector<std::optional<LabelMatrix>> data(plan.datasets.size());
  std::vector<std::string> load_errors(plan.datasets.size());
  std::vector<std::string> names;
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    names.push_back(plan.datasets[d].stem().string());
    try {
      data[d] = io::read_labels(plan.datasets[d], plan.format);
    } catch (const std::exception& e) {
      load_errors[d] = e.what();
    }
  }

  SplitConfig base;
  base.k = plan.k;
  base.max_epochs = plan.max_epochs;
  base.balance_candidates = plan.balance_candidates;
  std::vector<std::optional<MethodSpec>> methods(plan.methods.size());
  std::vector<std::string> method_names(plan.methods.size());
  std::vector<std::string> method_errors(plan.methods.size());
  for (std::size_t m = 0; m < plan.methods.size(); ++m) {
    method_names[m] = plan.methods[m];
    try {
      methods[m] = parse_method_spec(plan.methods[m], base);
      method_names[m] = methods[m]->name;
    } catch (const std::exception& e) {
      method_errors[m] = e.what();
    }
  }

  const auto seeds = static_cast<std::size_t>(plan.seeds);
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < data.size(); ++d) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      for (int s = 0; s < plan.seeds; ++s) cells.push_back({d, m, s});
    }
  }
  std::vector<io::ReportRow> results(cells.size());

  auto run_cell = [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(cell.seed_index);
    io::ReportRow row{names[cell.dataset], method_names[cell.method], std::to_string(seed), std::nullopt, 0.0, {}};
    if (!data[cell.dataset]) {
      row.error = load_errors[cell.dataset];
    } else if (!methods[cell.method]) {
      row.error = method_errors[cell.method];
    } else {
      try {
        SplitConfig config = methods[cell.method]->config;
        config.seed = seed;
        const LabelMatrix& labels = *data[cell.dataset];
        const auto start = Clock::now();
        const FoldAssignment folds = make_split(labels, config);
        row.runtime_s = seconds_since(start);
        row.scores = evaluate_all(labels, folds);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
    results[idx] = std::move(row);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) run_cell(idx);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }

  BenchResult result;
  for (std::size_t g = 0; g < cells.size(); g += seeds) {
    std::vector<io::ReportRow> group(results.begin() + static_cast<std::ptrdiff_t>(g),
                                     results.begin() + static_cast<std::ptrdiff_t>(g + seeds));
    for (const auto& r : group) {
      if (!r.scores) result.all_ok = false;
      result.rows.push_back(r);
    }
    result.rows.push_back(mean_row(group.front().dataset, group.front().method, group));
  }
  return result;
}

namespace {

void print_evaluation(std::ostream& out, const Evaluation& e, std::optional<double> runtime) {
  out << "ed,ld,dcp,rld" << (runtime ? ",runtime_s" : "") << '\n';
  out << io::format_double(e.ed) << ',' << io::format_double(e.ld) << ',' << io::format_double(e.dcp) << ','
      << io::format_double(e.rld);
  if (runtime) out << ',' << io::format_double(*runtime);
  out << '\n';
}

struct Options {
  std::string labels;
  std::string format = "label-list";
  std::string folds;
  std::vector<std::string> methods;
  FoldId k = 5;
  std::optional<FoldId> k_override;
  std::uint64_t seed = 0;
  int seeds = 10;
  std::string measure = "rld";
  int max_epochs = 20;
  Count candidates = 8;
  std::optional<double> test_fraction;
  std::string out;
  std::string scenario = "equal";
  Index n = 100000;
  Index q = 100;
  bool materialise = false;
  std::string surrogate;
  std::vector<std::string> datasets;
};

int cmd_split(const Options& o, std::ostream& out, std::ostream& err) {
  const LabelMatrix labels = io::read_labels(o.labels, io::parse_label_format(o.format));
  SplitConfig base;
  base.k = o.k;
  base.seed = o.seed;
  base.max_epochs = o.max_epochs;
  base.balance_candidates = o.candidates;
  base.optimise_measure = parse_measure(o.measure);
  MethodSpec spec = parse_method_spec(o.methods.empty() ? "optisplit" : o.methods.front(), base);
  spec.config.seed = o.seed;

  if (o.test_fraction) {
    const auto start = Clock::now();
    const TrainTestSplit split = train_test_split(labels, *o.test_fraction, spec.config);
    const double runtime = seconds_since(start);
    io::write_indices(o.out + ".train", split.train);
    io::write_indices(o.out + ".test", split.test);
    out << "train,test,runtime_s\n" << split.train.size() << ',' << split.test.size() << ','
        << io::format_double(runtime) << '\n';
    return 0;
  }

  if (!o.folds.empty()) {
    if (spec.config.method != Method::optisplit) throw Error("--folds as an initial split requires optisplit");
    spec.config.init = io::read_folds(o.folds, labels.n(), spec.config.k);
  }

  FoldAssignment folds;
  const auto start = Clock::now();
  if (spec.config.method == Method::optisplit) {
    OptisplitResult result = optisplit(labels, spec.config);
    folds = std::move(result.folds);
    const auto& t = result.trace;
    err << fmt::format("optisplit: {} epochs, initial loss {}, final loss {}, {} balances, {} skipped, {}\n",
                       t.epoch_losses.size(), t.initial_loss, t.epoch_losses.back(), t.balance_calls, t.skips,
                       t.reason == Termination::converged ? "converged" : "max_epochs reached");
  } else {
    folds = make_split(labels, spec.config);
  }
  const double runtime = seconds_since(start);
  io::write_folds(o.out, folds);
  print_evaluation(out, evaluate_all(labels, folds), runtime);
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const LabelMatrix labels = io::read_labels(o.labels, io::parse_label_format(o.format));
  const FoldAssignment folds = io::read_folds(o.folds, labels.n(), o.k_override);
  print_evaluation(out, evaluate_all(labels, folds), std::nullopt);
  return 0;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  BenchPlan plan;
  plan.datasets.assign(o.datasets.begin(), o.datasets.end());
  if (!o.methods.empty()) plan.methods = o.methods;
  plan.k = o.k;
  plan.base_seed = o.seed;
  plan.seeds = o.seeds;
  plan.max_epochs = o.max_epochs;
  plan.balance_candidates = o.candidates;
  plan.format = io::parse_label_format(o.format);
  const BenchResult result = run_bench(plan, thread_budget());

  for (const auto& r : result.rows) {
    if (!r.scores && r.seed != "mean") err << fmt::format("{} / {} / seed {}: {}\n", r.dataset, r.method, r.seed, r.error);
  }
  if (o.out.empty()) {
    io::write_report(out, result.rows);
  } else {
    std::ofstream file(o.out);
    if (!file) throw Error(fmt::format("cannot open '{}' for writing", o.out));
    io::write_report(file, result.rows);
  }
  return result.all_ok ? 0 : 2;
}

int cmd_synthetic(const Options& o, std::ostream& out) {
  if (!o.surrogate.empty()) {
    if (o.surrogate != "bibtex") throw Error(fmt::format("unknown surrogate profile '{}'", o.surrogate));
    if (o.labels.empty()) throw Error("--surrogate needs --labels to write to");
    io::write_labels(o.labels, surrogate_dataset(bibtex_profile(), o.seed));
    return 0;
  }

  SyntheticSpec spec;
  spec.n = o.n;
  spec.q = o.q;
  spec.k = o.k_override.value_or(10);
  spec.scenario = parse_scenario(o.scenario);

  if (o.materialise) {
    if (o.labels.empty() || o.folds.empty()) throw Error("--materialise needs --labels and --folds to write to");
    const MaterialisedSplit m = materialise(spec);
    io::write_labels(o.labels, m.labels);
    io::write_folds(o.folds, m.folds);
    return 0;
  }

  io::CsvTable table;
  table.header = {"class_index", "class_size", "ld", "rld", "dcp"};
  for (const SyntheticRow& r : synthetic_report(spec)) {
    table.rows.push_back({std::to_string(r.class_index), std::to_string(r.class_size), io::format_double(r.ld),
                          io::format_double(r.rld), io::format_double(r.dcp)});
  }
  if (o.out.empty()) {
    io::write_csv(out, table);
  } else {
    std::ofstream file(o.out);
    if (!file) throw Error(fmt::format("cannot open '{}' for writing", o.out));
    io::write_csv(file, table);
  }
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const io::DatasetStats s = io::dataset_stats(io::read_labels(o.labels, io::parse_label_format(o.format)));
  out << "n,labels,density,min,p25,p50,p75,max\n";
  out << s.n << ',' << s.q << ',' << io::format_double(s.density) << ',' << s.min << ',' << s.p25 << ',' << s.p50
      << ',' << s.p75 << ',' << s.max << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stratified multilabel cross-validation splits and split-quality measures", "stratkit"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "Label file format")
        ->check(CLI::IsMember({"label-list", "dense-csv"}))
        ->capture_default_str();
  };

  auto* split = app.add_subcommand("split", "Generate a fold assignment (or a train/test split)");
  split->add_option("--labels", o.labels, "Label file")->required();
  add_format(split);
  split->add_option("--method", o.methods, "random, is, pmbsrs, optisplit, optisplit_rld or optisplit_dcp")
      ->expected(1);
  split->add_option("--k", o.k, "Number of folds")->capture_default_str();
  split->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  split->add_option("--measure", o.measure, "Measure optimised by optisplit (rld or dcp)")->capture_default_str();
  split->add_option("--max-epochs", o.max_epochs, "Epoch budget for optisplit")->capture_default_str();
  split->add_option("--candidates", o.candidates, "Candidates per optisplit balance move (1 = uniform)")
      ->capture_default_str();
  split->add_option("--folds", o.folds, "Initial fold assignment for optisplit");
  split->add_option("--test-fraction", o.test_fraction, "Emit <out>.train/<out>.test instead of folds");
  split->add_option("--out", o.out, "Output fold file (or prefix with --test-fraction)")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score an existing fold assignment");
  evaluate->add_option("--labels", o.labels, "Label file")->required();
  add_format(evaluate);
  evaluate->add_option("--folds", o.folds, "Fold file")->required();
  evaluate->add_option("--k", o.k_override, "Fold count (default: largest index + 1)");

  auto* bench = app.add_subcommand("bench", "Benchmark methods over seeds and datasets");
  bench->add_option("--labels", o.datasets, "Label files")->required();
  add_format(bench);
  bench->add_option("--method", o.methods, "Methods to run")->delimiter(',');
  bench->add_option("--k", o.k, "Number of folds")->capture_default_str();
  bench->add_option("--seed", o.seed, "Base seed; run i uses seed + i")->capture_default_str();
  bench->add_option("--seeds", o.seeds, "Number of seeded runs")->capture_default_str();
  bench->add_option("--max-epochs", o.max_epochs, "Epoch budget for optisplit")->capture_default_str();
  bench->add_option("--candidates", o.candidates, "Candidates per optisplit balance move (1 = uniform)")
      ->capture_default_str();
  bench->add_option("--out", o.out, "Report CSV (default: stdout)");

  auto* synthetic = app.add_subcommand("synthetic", "Per-class measure scores on synthetic fold patterns");
  synthetic->add_option("--scenario", o.scenario, "equal, difference or one_missing")->capture_default_str();
  synthetic->add_option("--n", o.n, "Data points")->capture_default_str();
  synthetic->add_option("--q", o.q, "Classes")->capture_default_str();
  synthetic->add_option("--k", o.k_override, "Folds (default 10)");
  synthetic->add_option("--out", o.out, "Per-class CSV (default: stdout)");
  synthetic->add_flag("--materialise", o.materialise, "Write the pattern as a label file and a fold file");
  synthetic->add_option("--labels", o.labels, "Label file to write");
  synthetic->add_option("--folds", o.folds, "Fold file to write");
  synthetic->add_option("--surrogate", o.surrogate, "Write a seeded surrogate dataset for a named profile (bibtex)");
  synthetic->add_option("--seed", o.seed, "Seed for --surrogate")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Dataset statistics: size, labels, density, class-size quantiles");
  stats->add_option("--labels", o.labels, "Label file")->required();
  add_format(stats);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (split->parsed()) return cmd_split(o, out, err);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (bench->parsed()) return cmd_bench(o, out, err);
    if (synthetic->parsed()) return cmd_synthetic(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace stratkit::cli
