#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fairal/graph.hpp"
#include "fairal/params.hpp"
#include "fairal/rng.hpp"
#include "fairal/tensor.hpp"

namespace fairal {

struct ModelConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims = {64, 64};
  std::size_t num_classes = 2;
  std::size_t num_groups = 2;
  double dropout_rate = 0.5;
  /// Weight of the adversarial group loss. 0 disables the adversarial path.
  double lambda = 0.0;
  /// Builds the group head even when lambda == 0 (it then receives no
  /// gradient and the encoder is unaffected).
  bool adversarial_head = false;
  double lr = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Per-epoch mean losses, weighted by batch size. adversary_loss entries are
/// 0 when the adversarial path is inactive.
struct TrainLog {
  std::vector<double> task_loss;
  std::vector<double> adversary_loss;
};

/// T stochastic forward passes; p is laid out [pass][sample][class].
struct McPredictions {
  std::size_t passes = 0;
  std::size_t samples = 0;
  std::size_t classes = 0;
  std::vector<double> p;

  double at(std::size_t t, std::size_t n, std::size_t c) const {
    return p[(t * samples + n) * classes + c];
  }
};

/// Two-headed dropout classifier: shared MLP encoder, a class head, and an
/// optional group head that sees the representation through a gradient
/// reversal. Construction captures a value snapshot so reset_weights() can
/// restore the exact initial state between labelling rounds.
class Model {
 public:
  Model(ModelConfig config, RngStream& init_rng);

  const ModelConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  bool has_group_head() const { return has_group_head_; }
  const std::vector<Tensor>& initial_snapshot() const { return snapshot_; }

  /// Shuffled minibatch SGD on l_y + lambda * l_a for config().epochs epochs
  /// with dropout active. Requires at least 2 samples. Throws TrainingError
  /// naming the epoch if the loss or a gradient goes non-finite.
  TrainLog train(const Tensor& x, std::span<const int> y,
                 std::span<const int> a, RngStream& shuffle_rng,
                 RngStream& dropout_rng);

  /// T forward passes through the class head with fresh dropout masks each
  /// pass. T must be >= 1.
  McPredictions mc_predict(const Tensor& inputs, std::size_t passes,
                           RngStream& dropout_rng);

  /// Single deterministic pass with dropout disabled; rows are class
  /// probability vectors.
  Tensor predict_eval(const Tensor& inputs);

  /// Restores parameters to the construction-time snapshot bit-exactly and
  /// zeroes momentum.
  void reset_weights();

  struct BatchLosses {
    double task = 0.0;
    double adversary = 0.0;
  };

  /// Forward pass over one batch. `dropout_rng` may be null when mode is
  /// kEval. Exposed for gradient verification.
  BatchLosses compute_losses(const Tensor& x, std::span<const int> y,
                             std::span<const int> a, DropoutMode mode,
                             RngStream* dropout_rng);

  /// compute_losses plus a backward sweep; gradients accumulate into
  /// params() without an optimizer step.
  BatchLosses accumulate_gradients(const Tensor& x, std::span<const int> y,
                                   std::span<const int> a, DropoutMode mode,
                                   RngStream* dropout_rng);

 private:
  /// Builds encoder forward up to the representation z.
  NodeId forward_encoder(Graph& g, NodeId x_node, DropoutMode mode,
                         RngStream* dropout_rng);
  NodeId forward_class_logits(Graph& g, NodeId z);
  NodeId forward_group_logits(Graph& g, NodeId z);

  struct LossNodes {
    NodeId total;
    NodeId task;
    bool has_adv = false;
    NodeId adv = 0;
  };
  LossNodes forward_losses(Graph& g, const Tensor& x, std::span<const int> y,
                           std::span<const int> a, DropoutMode mode,
                           RngStream* dropout_rng);

  void check_batch(const Tensor& x, std::span<const int> y,
                   std::span<const int> a) const;

  ModelConfig config_;
  ParameterSet params_;
  std::vector<Tensor> snapshot_;
  bool has_group_head_ = false;
  std::size_t encoder_layers_ = 0;
};

inline Model build_model(ModelConfig config, RngStream& init_rng) {
  return Model(std::move(config), init_rng);
}

}  // namespace fairal
