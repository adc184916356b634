#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fairal/model.hpp"
#include "fairal/rng.hpp"

namespace fairal {

enum class Strategy { kBald, kEntropy, kUniform, kBalancedUniform };

const char* strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Per-sample uncertainty decomposition over MC passes, all in nats:
///   total_entropy      H(mean_t p_t)
///   aleatoric          mean_t H(p_t)
///   mutual_information total - aleatoric, floored at 0
struct AcquisitionScores {
  std::vector<double> total_entropy;
  std::vector<double> aleatoric;
  std::vector<double> mutual_information;
};

/// BALD decomposition of McPredictions. The mutual information is evaluated
/// as mean_t KL(p_t || p_mean), which equals the entropy difference but is
/// exactly 0 when every pass agrees and is invariant to pass order (the mean
/// and all per-pass reductions accumulate in sorted order).
AcquisitionScores bald_scores(const McPredictions& preds);

/// Predictive entropy H(mean_t p_t) per sample.
std::vector<double> entropy_scores(const McPredictions& preds);

/// Query selected in one acquisition round.
struct QueryBatch {
  std::vector<std::size_t> indices;  // pool indices, selection order
  Strategy strategy = Strategy::kUniform;
  std::size_t step = 0;
};

/// k highest-scoring pool entries, ties broken by lower pool index.
/// scores[i] scores pool[i]. Returns the whole pool when it has fewer than k
/// entries and an empty batch for an empty pool.
QueryBatch select_topk(std::span<const double> scores,
                       std::span<const std::size_t> pool, std::size_t k);

/// k pool entries uniformly without replacement.
QueryBatch uniform_select(std::span<const std::size_t> pool, std::size_t k,
                          RngStream& rng);

/// Splits k as evenly as possible across the two group values of the pool
/// entries (odd remainder assigned by rng), sampling uniformly within each
/// group; a short group's deficit spills to the other. groups is indexed by
/// pool entry value.
QueryBatch balanced_uniform_select(std::span<const std::size_t> pool,
                                   std::size_t k, std::span<const int> groups,
                                   RngStream& rng);

}  // namespace fairal
