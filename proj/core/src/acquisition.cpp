#include "fairal/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairal/errors.hpp"

namespace fairal {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kBald: return "bald";
    case Strategy::kEntropy: return "entropy";
    case Strategy::kUniform: return "uniform";
    case Strategy::kBalancedUniform: return "balanced_uniform";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "bald") return Strategy::kBald;
  if (name == "entropy") return Strategy::kEntropy;
  if (name == "uniform") return Strategy::kUniform;
  if (name == "balanced_uniform") return Strategy::kBalancedUniform;
  throw ConfigError("unknown strategy: " + std::string(name));
}

namespace {

// Sum in ascending sorted order so the result does not depend on the order
// the values were produced in (MC passes are permutable).
double sorted_sum(std::vector<double>& scratch) {
  std::sort(scratch.begin(), scratch.end());
  double s = 0.0;
  for (double v : scratch) s += v;
  return s;
}

// Entropy in nats with 0 * ln 0 := 0. Exact 0 for one-hot rows.
double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

void check_preds(const McPredictions& preds) {
  if (preds.passes < 1 || preds.samples < 1 || preds.classes < 1 ||
      preds.p.size() != preds.passes * preds.samples * preds.classes) {
    throw ShapeError("acquisition: malformed McPredictions");
  }
}

// Mean over passes of p[.][n][c], anchored at the per-(n, c) maximum: the
// deviations from the maximum are summed (sorted) and divided by T, so equal
// passes yield the common value bitwise.
std::vector<double> pass_mean(const McPredictions& preds, std::size_t n) {
  std::size_t T = preds.passes, C = preds.classes;
  std::vector<double> mean(C);
  std::vector<double> dev(T);
  for (std::size_t c = 0; c < C; ++c) {
    double top = preds.at(0, n, c);
    for (std::size_t t = 1; t < T; ++t) top = std::max(top, preds.at(t, n, c));
    for (std::size_t t = 0; t < T; ++t) dev[t] = preds.at(t, n, c) - top;
    mean[c] = top + sorted_sum(dev) / static_cast<double>(T);
  }
  return mean;
}

}  // namespace

AcquisitionScores bald_scores(const McPredictions& preds) {
  check_preds(preds);
  std::size_t T = preds.passes, N = preds.samples, C = preds.classes;
  AcquisitionScores out;
  out.total_entropy.resize(N);
  out.aleatoric.resize(N);
  out.mutual_information.resize(N);

  std::vector<double> per_pass(T);
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<double> mean = pass_mean(preds, n);
    out.total_entropy[n] = entropy(mean);

    for (std::size_t t = 0; t < T; ++t) {
      double h = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        double v = preds.at(t, n, c);
        if (v > 0.0) h -= v * std::log(v);
      }
      per_pass[t] = h;
    }
    out.aleatoric[n] = sorted_sum(per_pass) / static_cast<double>(T);

    // KL(p_t || mean) per pass; log(1) == 0 exactly when a pass equals the
    // mean, so agreement gives mutual information 0 with no subtraction
    // noise.
    for (std::size_t t = 0; t < T; ++t) {
      double kl = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        double v = preds.at(t, n, c);
        if (v > 0.0) kl += v * std::log(v / mean[c]);
      }
      per_pass[t] = kl;
    }
    double mi = sorted_sum(per_pass) / static_cast<double>(T);
    out.mutual_information[n] = mi > 0.0 ? mi : 0.0;
  }
  return out;
}

std::vector<double> entropy_scores(const McPredictions& preds) {
  check_preds(preds);
  std::vector<double> out(preds.samples);
  for (std::size_t n = 0; n < preds.samples; ++n) {
    out[n] = entropy(pass_mean(preds, n));
  }
  return out;
}

QueryBatch select_topk(std::span<const double> scores,
                       std::span<const std::size_t> pool, std::size_t k) {
  if (k < 1) throw ConfigError("select_topk: k must be >= 1");
  if (scores.size() != pool.size()) {
    throw ShapeError("select_topk: one score per pool entry required");
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (scores[i] != scores[j]) return scores[i] > scores[j];
    return pool[i] < pool[j];
  });
  QueryBatch batch;
  std::size_t take = std::min(k, pool.size());
  batch.indices.reserve(take);
  for (std::size_t r = 0; r < take; ++r) batch.indices.push_back(pool[order[r]]);
  return batch;
}

namespace {

// First k entries of a uniform permutation (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(
    std::vector<std::size_t> items, std::size_t k, RngStream& rng) {
  std::size_t take = std::min(k, items.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + rng.uniform_below(items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(take);
  return items;
}

}  // namespace

QueryBatch uniform_select(std::span<const std::size_t> pool, std::size_t k,
                          RngStream& rng) {
  if (k < 1) throw ConfigError("uniform_select: k must be >= 1");
  QueryBatch batch;
  batch.strategy = Strategy::kUniform;
  if (pool.empty()) return batch;
  batch.indices = sample_without_replacement(
      std::vector<std::size_t>(pool.begin(), pool.end()), k, rng);
  return batch;
}

QueryBatch balanced_uniform_select(std::span<const std::size_t> pool,
                                   std::size_t k, std::span<const int> groups,
                                   RngStream& rng) {
  if (k < 1) throw ConfigError("balanced_uniform_select: k must be >= 1");
  QueryBatch batch;
  batch.strategy = Strategy::kBalancedUniform;
  if (pool.empty()) return batch;

  std::vector<std::size_t> g0, g1;
  for (std::size_t idx : pool) {
    if (idx >= groups.size()) {
      throw IndexError("balanced_uniform_select: pool index has no group");
    }
    (groups[idx] == 0 ? g0 : g1).push_back(idx);
  }

  std::size_t want0 = k / 2;
  if (k % 2 != 0 && rng.bernoulli(0.5)) ++want0;
  // Spill: a group short of its share hands the deficit to the other.
  std::size_t take0 = std::min(g0.size(), std::max(want0, k - std::min(k, g1.size())));
  std::size_t take1 = std::min(g1.size(), k - take0);

  std::vector<std::size_t> pick0 =
      sample_without_replacement(std::move(g0), take0, rng);
  std::vector<std::size_t> pick1 =
      sample_without_replacement(std::move(g1), take1, rng);
  batch.indices = std::move(pick0);
  batch.indices.insert(batch.indices.end(), pick1.begin(), pick1.end());
  return batch;
}

}  // namespace fairal
