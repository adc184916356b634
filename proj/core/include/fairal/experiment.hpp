#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairal/acquisition.hpp"
#include "fairal/datagen.hpp"
#include "fairal/model.hpp"

namespace fairal {

struct ExperimentConfig {
  DatasetSpec dataset;
  ModelConfig model;  // input_dim 0 means "use dataset.feature_dim"
  Strategy strategy = Strategy::kUniform;
  std::size_t query_size = 50;
  std::size_t mc_passes = 20;
  std::size_t initial_labelled = 100;
  double budget_fraction = 0.10;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::string output;

  /// Resolves model.input_dim against the dataset and checks ranges.
  void validate_and_resolve();
};

/// One evaluated step of one run; mirrors the records CSV columns. Rate
/// metrics are stored as fractions and written as percent.
struct StepRecord {
  Strategy strategy = Strategy::kUniform;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::size_t n_labelled = 0;
  double accuracy = 0.0;
  double predictive_parity = 0.0;
  double eq_odds_gap = 0.0;
  double eq_opp_gap = 0.0;
  double nll = 0.0;
  double epistemic_gap = 0.0;
  std::size_t labelled_g0 = 0;
  std::size_t labelled_g1 = 0;
  double wall_ms = 0.0;
};

struct RunResult {
  std::vector<StepRecord> records;
  /// True when the unlabelled pool ran dry before the label budget.
  bool truncated = false;
  /// mc_predict invocations made for acquisition scoring (not evaluation);
  /// stays 0 for the uniform strategies.
  std::size_t selection_mc_calls = 0;
};

/// Snapshot handed to the step observer right after the weight reset and
/// before training.
struct StepProbe {
  std::size_t step;
  const Model& model;
  const PoolState& pools;
  const Dataset& dataset;
};
using StepObserver = std::function<void(const StepProbe&)>;

/// One active-learning run: generate data (dataset seed = run seed), split
/// pools, then loop reset / train / evaluate / query until the budget
/// lround(budget_fraction * pool size) is labelled. Derives independent RNG
/// streams per role from the seed, with per-step streams for selection and
/// MC evaluation.
RunResult run_single(const ExperimentConfig& config, std::uint64_t seed,
                     const StepObserver& on_step_start = {});

struct MetricStat {
  double mean = 0.0;
  double std_dev = 0.0;
  bool has_std = false;  // needs >= 2 completed seeds
};

/// Final-step aggregate over the seeds of one config.
struct SummaryRow {
  Strategy strategy = Strategy::kUniform;
  double lambda = 0.0;
  std::size_t seeds_completed = 0;
  std::size_t seeds_failed = 0;
  std::string first_error;
  MetricStat accuracy, predictive_parity, eq_odds_gap, eq_opp_gap, nll,
      epistemic_gap;
};

struct SuiteResult {
  std::vector<StepRecord> records;  // ordered (config, seed, step)
  std::vector<SummaryRow> summary;  // one row per config
  bool any_failed = false;
};

/// Runs every (config, seed) cell; a failing cell is recorded on its summary
/// row and the rest of the suite continues.
SuiteResult run_suite(std::span<const ExperimentConfig> configs);

/// Sample mean and standard deviation (n - 1 denominator) of each seed's
/// final-step record, grouped by (strategy, lambda) in first-appearance
/// order.
std::vector<SummaryRow> summarize(std::span<const StepRecord> records);

inline constexpr const char* kRecordsCsvHeader =
    "strategy,lambda,seed,step,n_labelled,accuracy,predictive_parity,"
    "eq_odds_gap,eq_opp_gap,nll,epistemic_gap,labelled_g0,labelled_g1,"
    "wall_ms";

/// Records CSV: pinned header above; rate metrics in percent (2 decimals),
/// nll and epistemic_gap raw nats (4 decimals), wall_ms a rounded integer.
void write_records_csv(std::span<const StepRecord> records,
                       const std::string& path);
std::vector<StepRecord> read_records_csv(const std::string& path);

/// Summary CSV, one row per config with mean/std columns.
void write_summary_csv(std::span<const SummaryRow> summary,
                       const std::string& path);

/// Fixed-width text table of the summary (percent scale for rates).
std::string format_summary_table(std::span<const SummaryRow> summary);

/// One SVG per metric: n_labelled on x, seed-mean on y with a +-std band,
/// one series per strategy/lambda pair. Returns the written file paths.
std::vector<std::string> write_curves(std::span<const StepRecord> records,
                                      const std::string& out_dir);

}  // namespace fairal
