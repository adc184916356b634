#include "fairal/metrics.hpp"

#include <cmath>
#include <string>

#include "fairal/errors.hpp"

namespace fairal {

namespace {

constexpr double kLogClamp = 1e-12;

void check_batch(const EvalBatch& batch) {
  std::size_t n = batch.labels.size();
  if (batch.probabilities.rank() != 2 || batch.probabilities.rows() != n ||
      batch.predicted.size() != n || batch.groups.size() != n) {
    throw ShapeError("metrics: EvalBatch field lengths disagree");
  }
  for (int a : batch.groups) {
    if (a != 0 && a != 1) throw IndexError("metrics: groups must be 0 or 1");
  }
}

void check_binary_labels(const EvalBatch& batch) {
  for (int y : batch.labels) {
    if (y != 0 && y != 1) {
      throw IndexError("metrics: outcome-rate metrics need binary labels");
    }
  }
}

// P(pred = 1 | label = gamma) per group; count 0 marks the rate undefined.
struct Rate {
  std::size_t hits = 0;
  std::size_t total = 0;
  double value() const {
    return static_cast<double>(hits) / static_cast<double>(total);
  }
};

std::array<Rate, 2> outcome_rates(const EvalBatch& batch, int gamma) {
  std::array<Rate, 2> rates;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.labels[i] != gamma) continue;
    Rate& r = rates[static_cast<std::size_t>(batch.groups[i])];
    ++r.total;
    if (batch.predicted[i] == 1) ++r.hits;
  }
  return rates;
}

}  // namespace

EvalBatch make_eval_batch(Tensor probabilities, std::vector<int> labels,
                          std::vector<int> groups) {
  if (probabilities.rank() != 2) {
    throw ShapeError("metrics: probabilities must be [N x C]");
  }
  std::size_t n = probabilities.rows(), c = probabilities.cols();
  if (labels.size() != n || groups.size() != n) {
    throw ShapeError("metrics: one label and group per probability row");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw IndexError("metrics: label outside class range");
    }
  }
  EvalBatch batch;
  batch.predicted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c; ++j) {
      if (probabilities.at(i, j) > probabilities.at(i, best)) best = j;
    }
    batch.predicted[i] = static_cast<int>(best);
  }
  batch.probabilities = std::move(probabilities);
  batch.labels = std::move(labels);
  batch.groups = std::move(groups);
  check_batch(batch);
  return batch;
}

double accuracy(const EvalBatch& batch) {
  check_batch(batch);
  if (batch.size() == 0) throw MetricError("accuracy: empty batch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.predicted[i] == batch.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

double predictive_parity(const EvalBatch& batch) {
  check_batch(batch);
  std::array<std::size_t, 2> hits = {0, 0};
  std::array<std::size_t, 2> counts = {0, 0};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::size_t g = static_cast<std::size_t>(batch.groups[i]);
    ++counts[g];
    if (batch.predicted[i] == batch.labels[i]) ++hits[g];
  }
  double lo = 2.0, hi = -1.0;
  for (std::size_t g = 0; g < 2; ++g) {
    if (counts[g] == 0) continue;
    double acc = static_cast<double>(hits[g]) / static_cast<double>(counts[g]);
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  if (hi < 0.0) throw MetricError("predictive_parity: no group present");
  return hi - lo;
}

double equalized_odds_gap(const EvalBatch& batch) {
  check_batch(batch);
  check_binary_labels(batch);
  bool any = false;
  double gap = 0.0;
  for (int gamma : {0, 1}) {
    std::array<Rate, 2> rates = outcome_rates(batch, gamma);
    if (rates[0].total == 0 || rates[1].total == 0) continue;
    any = true;
    gap = std::max(gap, std::abs(rates[0].value() - rates[1].value()));
  }
  if (!any) {
    throw MetricError(
        "equalized_odds_gap: no outcome has samples in both groups");
  }
  return gap;
}

double equal_opportunity_gap(const EvalBatch& batch) {
  check_batch(batch);
  check_binary_labels(batch);
  std::array<Rate, 2> rates = outcome_rates(batch, 1);
  if (rates[0].total == 0 || rates[1].total == 0) {
    throw MetricError(
        "equal_opportunity_gap: a group has no positive samples");
  }
  return std::abs(rates[0].value() - rates[1].value());
}

double nll(const EvalBatch& batch) {
  check_batch(batch);
  if (batch.size() == 0) throw MetricError("nll: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double p = batch.probabilities.at(
        i, static_cast<std::size_t>(batch.labels[i]));
    total += -std::log(p < kLogClamp ? kLogClamp : p);
  }
  return total / static_cast<double>(batch.size());
}

double epistemic_gap(std::span<const double> mutual_information,
                     std::span<const int> groups) {
  if (mutual_information.size() != groups.size()) {
    throw ShapeError("epistemic_gap: one group per score required");
  }
  std::array<double, 2> sums = {0.0, 0.0};
  std::array<std::size_t, 2> counts = {0, 0};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    int a = groups[i];
    if (a != 0 && a != 1) {
      throw IndexError("epistemic_gap: groups must be 0 or 1");
    }
    sums[static_cast<std::size_t>(a)] += mutual_information[i];
    ++counts[static_cast<std::size_t>(a)];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw MetricError("epistemic_gap: a group is absent");
  }
  return std::abs(sums[0] / static_cast<double>(counts[0]) -
                  sums[1] / static_cast<double>(counts[1]));
}

double epistemic_gap(const AcquisitionScores& scores,
                     std::span<const int> groups) {
  return epistemic_gap(std::span<const double>(scores.mutual_information),
                       groups);
}

FairnessReport evaluate(const EvalBatch& batch) {
  check_batch(batch);
  FairnessReport report;
  report.accuracy = accuracy(batch);
  report.predictive_parity = predictive_parity(batch);
  report.equalized_odds_gap = equalized_odds_gap(batch);
  report.equal_opportunity_gap = equal_opportunity_gap(batch);
  report.nll = nll(batch);
  std::array<std::size_t, 2> hits = {0, 0};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::size_t g = static_cast<std::size_t>(batch.groups[i]);
    ++report.group_count[g];
    if (batch.predicted[i] == batch.labels[i]) ++hits[g];
  }
  for (std::size_t g = 0; g < 2; ++g) {
    if (report.group_count[g] > 0) {
      report.group_accuracy[g] = static_cast<double>(hits[g]) /
                                 static_cast<double>(report.group_count[g]);
    }
  }
  return report;
}

}  // namespace fairal
