#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fairal/acquisition.hpp"
#include "fairal/tensor.hpp"

namespace fairal {

/// Predictions joined with ground truth for one evaluation set. Groups are
/// binary (0/1) everywhere in this library.
struct EvalBatch {
  std::vector<int> predicted;  // argmax of probabilities, low index on ties
  Tensor probabilities;        // N x C
  std::vector<int> labels;
  std::vector<int> groups;

  std::size_t size() const { return labels.size(); }
};

/// Builds an EvalBatch, deriving predicted classes from the probability rows.
EvalBatch make_eval_batch(Tensor probabilities, std::vector<int> labels,
                          std::vector<int> groups);

/// Fraction of samples with predicted == label.
double accuracy(const EvalBatch& batch);

/// max - min of per-group accuracy over the groups present. Empty groups are
/// excluded; throws MetricError when no group is present.
double predictive_parity(const EvalBatch& batch);

/// max over outcomes gamma in {0,1} of the absolute difference between the
/// groups' rates P(pred=1 | label=gamma). An outcome missing from either
/// group is skipped; throws MetricError when both outcomes are skipped.
double equalized_odds_gap(const EvalBatch& batch);

/// |TPR(group 0) - TPR(group 1)|; throws MetricError when a group has no
/// positive samples.
double equal_opportunity_gap(const EvalBatch& batch);

/// Mean -ln p(true class), probabilities clamped at 1e-12.
double nll(const EvalBatch& batch);

/// |mean MI over group 0 - mean MI over group 1|; throws MetricError when a
/// group is absent.
double epistemic_gap(std::span<const double> mutual_information,
                     std::span<const int> groups);
double epistemic_gap(const AcquisitionScores& scores,
                     std::span<const int> groups);

struct FairnessReport {
  double accuracy = 0.0;
  double predictive_parity = 0.0;
  double equalized_odds_gap = 0.0;
  double equal_opportunity_gap = 0.0;
  double nll = 0.0;
  std::array<double, 2> group_accuracy = {0.0, 0.0};
  std::array<std::size_t, 2> group_count = {0, 0};
};

/// All metrics over one batch. Requires every metric to be defined (both
/// groups present with both outcomes); intended for balanced test sets.
FairnessReport evaluate(const EvalBatch& batch);

}  // namespace fairal
