#include <cmath>
#include <vector>

#include <doctest.h>

#include "fairal/errors.hpp"
#include "fairal/metrics.hpp"
#include "fairal/rng.hpp"
#include "support/metric_cases.hpp"

using namespace fairal;
using testsupport::crisp_batch;
using testsupport::prob_batch;

TEST_CASE("hand-worked batches reproduce every metric exactly") {
  for (const auto& c : testsupport::metric_cases()) {
    CAPTURE(c.name);
    CHECK(accuracy(c.batch) == c.accuracy);
    CHECK(predictive_parity(c.batch) == c.parity);
    if (c.odds) {
      CHECK(equalized_odds_gap(c.batch) == *c.odds);
    } else {
      CHECK_THROWS_AS(equalized_odds_gap(c.batch), MetricError);
    }
    if (c.opp) {
      CHECK(equal_opportunity_gap(c.batch) == *c.opp);
    } else {
      CHECK_THROWS_AS(equal_opportunity_gap(c.batch), MetricError);
    }
    if (c.nll) CHECK(nll(c.batch) == *c.nll);
  }
}

TEST_CASE("empty batches are rejected") {
  EvalBatch empty;
  empty.probabilities = Tensor::matrix(0, 2);
  CHECK_THROWS_AS(accuracy(empty), MetricError);
  CHECK_THROWS_AS(predictive_parity(empty), MetricError);
  CHECK_THROWS_AS(nll(empty), MetricError);
}

TEST_CASE("batch construction validates shapes and group values") {
  Tensor probs = Tensor::matrix(2, 2);
  probs.at(0, 0) = 1.0;
  probs.at(1, 1) = 1.0;
  CHECK_THROWS_AS(make_eval_batch(probs, {0}, {0, 1}), ShapeError);
  CHECK_THROWS_AS(make_eval_batch(probs, {0, 1}, {0}), ShapeError);
  CHECK_THROWS_AS(accuracy(make_eval_batch(probs, {0, 1}, {0, 2})),
                  IndexError);
  CHECK_THROWS_AS(accuracy(make_eval_batch(probs, {0, 3}, {0, 1})),
                  IndexError);
}

TEST_CASE("argmax prediction breaks ties toward the lower class") {
  EvalBatch b = prob_batch({{0.5, 0.5}, {0.2, 0.8}, {0.8, 0.2}}, {0, 1, 0},
                           {0, 0, 1});
  CHECK(b.predicted == std::vector<int>{0, 1, 0});
}

TEST_CASE("evaluate agrees with the individual metrics") {
  EvalBatch b = crisp_batch({1, 1, 0, 0, 1, 0, 1, 0}, {1, 1, 0, 0, 1, 1, 0, 0},
                            {0, 0, 0, 0, 1, 1, 1, 1});
  FairnessReport r = evaluate(b);
  CHECK(r.accuracy == accuracy(b));
  CHECK(r.predictive_parity == predictive_parity(b));
  CHECK(r.equalized_odds_gap == equalized_odds_gap(b));
  CHECK(r.equal_opportunity_gap == equal_opportunity_gap(b));
  CHECK(r.nll == nll(b));
  CHECK(r.group_count[0] == 4);
  CHECK(r.group_count[1] == 4);
  CHECK(r.group_accuracy[0] == 1.0);
  CHECK(r.group_accuracy[1] == 0.5);
}

TEST_CASE("swapping group labels never changes a gap metric") {
  RngStream rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 8 + rng.uniform_below(8);
    std::vector<int> y, a, yhat;
    // Force both groups and both labels present so all metrics are defined.
    for (std::size_t i = 0; i < n; ++i) {
      y.push_back(static_cast<int>(i % 2));
      a.push_back(static_cast<int>((i / 2) % 2));
      yhat.push_back(static_cast<int>(rng.uniform_below(2)));
    }
    EvalBatch batch = crisp_batch(yhat, y, a);
    std::vector<int> flipped = a;
    for (int& g : flipped) g = 1 - g;
    EvalBatch swapped = crisp_batch(yhat, y, flipped);

    CHECK(predictive_parity(batch) == predictive_parity(swapped));
    CHECK(equalized_odds_gap(batch) == equalized_odds_gap(swapped));
    CHECK(equal_opportunity_gap(batch) == equal_opportunity_gap(swapped));
    CHECK(accuracy(batch) == accuracy(swapped));

    double parity = predictive_parity(batch);
    CHECK(parity >= 0.0);
    CHECK(parity <= 1.0);
    double odds = equalized_odds_gap(batch);
    CHECK(odds >= 0.0);
    CHECK(odds <= 1.0);
  }
}

TEST_CASE("epistemic gap on hand cases") {
  std::vector<double> mi = {0.2, 0.2, 0.5, 0.5};
  std::vector<int> groups = {0, 0, 1, 1};
  CHECK(epistemic_gap(mi, groups) == std::abs(0.2 - 0.5));

  std::vector<double> single = {0.1, 0.3};
  std::vector<int> one_each = {1, 0};
  CHECK(epistemic_gap(single, one_each) == std::abs(0.3 - 0.1));

  std::vector<double> same = {0.4, 0.4};
  std::vector<int> both = {0, 1};
  CHECK(epistemic_gap(same, both) == 0.0);

  std::vector<int> only_zero = {0, 0};
  CHECK_THROWS_AS(epistemic_gap(same, only_zero), MetricError);

  std::vector<int> mismatched = {0};
  CHECK_THROWS_AS(epistemic_gap(same, mismatched), ShapeError);
}

TEST_CASE("epistemic gap overloads agree") {
  AcquisitionScores scores;
  scores.mutual_information = {0.05, 0.15, 0.25, 0.35};
  std::vector<int> groups = {0, 1, 0, 1};
  CHECK(epistemic_gap(scores, groups) ==
        epistemic_gap(scores.mutual_information, groups));
}

TEST_CASE("nll clamps vanishing probabilities") {
  EvalBatch b = prob_batch({{1.0, 0.0}}, {1}, {0});
  CHECK(nll(b) == -std::log(1e-12));
  CHECK(std::isfinite(nll(b)));
}
