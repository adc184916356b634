#include "fairal/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairal/errors.hpp"

namespace fairal {

namespace {

Tensor fan_in_uniform(std::size_t rows, std::size_t cols, RngStream& rng) {
  Tensor w({rows, cols});
  double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& v : w.values()) v = (2.0 * rng.uniform01() - 1.0) * bound;
  return w;
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim < 1) throw ConfigError("model: input_dim must be >= 1");
  if (num_classes < 2) throw ConfigError("model: num_classes must be >= 2");
  if (num_groups < 2) throw ConfigError("model: num_groups must be >= 2");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ConfigError("model: dropout_rate must satisfy 0 <= rate < 1");
  }
  if (lambda < 0.0) throw ConfigError("model: lambda must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("model: lr must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ConfigError("model: momentum must satisfy 0 <= m < 1");
  }
  if (batch_size < 1) throw ConfigError("model: batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("model: epochs must be >= 1");
}

Model::Model(ModelConfig config, RngStream& init_rng)
    : config_(std::move(config)) {
  config_.validate();
  has_group_head_ = config_.lambda > 0.0 || config_.adversarial_head;
  encoder_layers_ = config_.hidden_dims.size();

  std::size_t width = config_.input_dim;
  for (std::size_t i = 0; i < encoder_layers_; ++i) {
    std::size_t out = config_.hidden_dims[i];
    if (out < 1) throw ConfigError("model: hidden layer width must be >= 1");
    std::string base = "enc" + std::to_string(i);
    params_.add(base + ".weight", fan_in_uniform(width, out, init_rng));
    params_.add(base + ".bias", Tensor::vector(out));
    width = out;
  }
  params_.add("head_y.weight",
              fan_in_uniform(width, config_.num_classes, init_rng));
  params_.add("head_y.bias", Tensor::vector(config_.num_classes));
  if (has_group_head_) {
    params_.add("head_a.weight",
                fan_in_uniform(width, config_.num_groups, init_rng));
    params_.add("head_a.bias", Tensor::vector(config_.num_groups));
  }
  snapshot_ = snapshot_values(params_);
}

void Model::reset_weights() { restore_values(params_, snapshot_); }

NodeId Model::forward_encoder(Graph& g, NodeId x_node, DropoutMode mode,
                              RngStream* dropout_rng) {
  NodeId h = x_node;
  for (std::size_t i = 0; i < encoder_layers_; ++i) {
    std::size_t w_idx = 2 * i;
    h = g.add_row_bias(g.matmul(h, g.param(params_, w_idx)),
                       g.param(params_, w_idx + 1));
    h = g.relu(h);
    if (config_.dropout_rate > 0.0) {
      if (mode == DropoutMode::kTrain && dropout_rng == nullptr) {
        throw ConfigError("model: train-mode dropout needs an RNG stream");
      }
      static RngStream unused(0);  // eval mode never draws
      h = g.dropout(h, config_.dropout_rate, mode,
                    dropout_rng ? *dropout_rng : unused);
    }
  }
  return h;
}

NodeId Model::forward_class_logits(Graph& g, NodeId z) {
  std::size_t base = 2 * encoder_layers_;
  return g.add_row_bias(g.matmul(z, g.param(params_, base)),
                        g.param(params_, base + 1));
}

NodeId Model::forward_group_logits(Graph& g, NodeId z) {
  std::size_t base = 2 * encoder_layers_ + 2;
  return g.add_row_bias(g.matmul(z, g.param(params_, base)),
                        g.param(params_, base + 1));
}

void Model::check_batch(const Tensor& x, std::span<const int> y,
                        std::span<const int> a) const {
  if (x.rank() != 2 || x.cols() != config_.input_dim) {
    throw ShapeError("model: input must be [N x input_dim]");
  }
  if (!y.empty() && y.size() != x.rows()) {
    throw ShapeError("model: one class label per input row required");
  }
  if (!a.empty() && a.size() != x.rows()) {
    throw ShapeError("model: one group label per input row required");
  }
}

Model::LossNodes Model::forward_losses(Graph& g, const Tensor& x,
                                       std::span<const int> y,
                                       std::span<const int> a,
                                       DropoutMode mode,
                                       RngStream* dropout_rng) {
  NodeId z = forward_encoder(g, g.input(x), mode, dropout_rng);
  LossNodes out;
  out.task = g.softmax_cross_entropy(forward_class_logits(g, z), y);
  out.total = out.task;
  if (has_group_head_ && config_.lambda > 0.0) {
    NodeId reversed = g.grad_reverse(z, config_.lambda);
    out.adv = g.softmax_cross_entropy(forward_group_logits(g, reversed), a);
    out.has_adv = true;
    out.total = g.add(out.task, g.scale(out.adv, config_.lambda));
  }
  return out;
}

Model::BatchLosses Model::compute_losses(const Tensor& x,
                                         std::span<const int> y,
                                         std::span<const int> a,
                                         DropoutMode mode,
                                         RngStream* dropout_rng) {
  check_batch(x, y, a);
  Graph g;
  LossNodes nodes = forward_losses(g, x, y, a, mode, dropout_rng);
  BatchLosses losses;
  losses.task = g.value(nodes.task)[0];
  if (nodes.has_adv) losses.adversary = g.value(nodes.adv)[0];
  return losses;
}

Model::BatchLosses Model::accumulate_gradients(const Tensor& x,
                                               std::span<const int> y,
                                               std::span<const int> a,
                                               DropoutMode mode,
                                               RngStream* dropout_rng) {
  check_batch(x, y, a);
  Graph g;
  LossNodes nodes = forward_losses(g, x, y, a, mode, dropout_rng);
  g.backward(nodes.total);
  BatchLosses losses;
  losses.task = g.value(nodes.task)[0];
  if (nodes.has_adv) losses.adversary = g.value(nodes.adv)[0];
  return losses;
}

TrainLog Model::train(const Tensor& x, std::span<const int> y,
                      std::span<const int> a, RngStream& shuffle_rng,
                      RngStream& dropout_rng) {
  check_batch(x, y, a);
  std::size_t n = x.rows();
  if (n < 2) throw TrainingError("train: need at least 2 labelled samples");
  bool adv_active = has_group_head_ && config_.lambda > 0.0;
  if (adv_active && a.size() != n) {
    throw ShapeError("model: adversarial loss needs group labels");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainLog log;
  log.task_loss.reserve(config_.epochs);
  log.adversary_loss.reserve(config_.epochs);

  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double task_sum = 0.0;
    double adv_sum = 0.0;
    try {
      for (std::size_t start = 0; start < n; start += config_.batch_size) {
        std::size_t b = std::min(config_.batch_size, n - start);
        Tensor xb({b, config_.input_dim});
        std::vector<int> yb(b);
        std::vector<int> ab(adv_active ? b : 0);
        for (std::size_t r = 0; r < b; ++r) {
          std::size_t src = order[start + r];
          for (std::size_t c = 0; c < config_.input_dim; ++c) {
            xb.at(r, c) = x.at(src, c);
          }
          yb[r] = y[src];
          if (adv_active) ab[r] = a[src];
        }
        BatchLosses losses = accumulate_gradients(
            xb, yb, ab, DropoutMode::kTrain, &dropout_rng);
        sgd_step(params_, config_.lr, config_.momentum);
        task_sum += losses.task * static_cast<double>(b);
        adv_sum += losses.adversary * static_cast<double>(b);
      }
    } catch (const TrainingError& e) {
      throw TrainingError("epoch " + std::to_string(epoch + 1) + " of " +
                          std::to_string(config_.epochs) + ": " + e.what());
    }
    log.task_loss.push_back(task_sum / static_cast<double>(n));
    log.adversary_loss.push_back(adv_sum / static_cast<double>(n));
  }
  return log;
}

McPredictions Model::mc_predict(const Tensor& inputs, std::size_t passes,
                                RngStream& dropout_rng) {
  check_batch(inputs, std::span<const int>(), std::span<const int>());
  if (passes < 1) throw ConfigError("mc_predict: need at least 1 pass");
  std::size_t n = inputs.rows();
  McPredictions out;
  out.passes = passes;
  out.samples = n;
  out.classes = config_.num_classes;
  out.p.resize(passes * n * config_.num_classes);
  for (std::size_t t = 0; t < passes; ++t) {
    Graph g;
    NodeId z = forward_encoder(g, g.input(inputs), DropoutMode::kTrain,
                               &dropout_rng);
    Tensor probs = softmax_rows(g.value(forward_class_logits(g, z)));
    std::copy(probs.values().begin(), probs.values().end(),
              out.p.begin() + static_cast<std::ptrdiff_t>(
                                  t * n * config_.num_classes));
  }
  return out;
}

Tensor Model::predict_eval(const Tensor& inputs) {
  check_batch(inputs, std::span<const int>(), std::span<const int>());
  Graph g;
  NodeId z =
      forward_encoder(g, g.input(inputs), DropoutMode::kEval, nullptr);
  return softmax_rows(g.value(forward_class_logits(g, z)));
}

}  // namespace fairal
