#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairal/params.hpp"
#include "fairal/rng.hpp"
#include "fairal/tensor.hpp"

namespace fairal {

enum class Op : std::uint8_t {
  kInput,
  kParam,
  kMatmul,
  kAddRowBias,
  kRelu,
  kDropout,
  kGradReverse,
  kSoftmaxCrossEntropy,
  kAdd,
  kScale,
};

enum class DropoutMode { kTrain, kEval };

using NodeId = std::uint32_t;

/// Reverse-mode autodiff tape for a small dense classifier. Nodes are
/// appended in forward order, so the tape index order is a topological order
/// and backward() is a single reverse sweep that touches each node once.
///
/// Every forward op validates that its output is finite and throws
/// TrainingError otherwise; shape violations throw ShapeError.
class Graph {
 public:
  /// Leaf holding a copy of `value`.
  NodeId input(Tensor value);

  /// Leaf bound to params[index]; backward() accumulates into the parameter's
  /// grad buffer. Repeated calls for the same entry return the same node.
  NodeId param(ParameterSet& params, std::size_t index);

  /// Matrix product [N x K] * [K x M] -> [N x M].
  /// Backward: dA = dOut * B^T, dB = A^T * dOut.
  NodeId matmul(NodeId a, NodeId b);

  /// Adds a length-M bias vector to every row of an [N x M] input. The only
  /// broadcast the engine supports.
  NodeId add_row_bias(NodeId x, NodeId bias);

  /// Elementwise max(0, x); gradient is 0 at x == 0.
  NodeId relu(NodeId x);

  /// Inverted dropout: in train mode each element is zeroed independently
  /// with probability `rate` and survivors are scaled by 1/(1-rate); in eval
  /// mode the op is the identity. Backward applies the same mask.
  /// rate must satisfy 0 <= rate < 1.
  NodeId dropout(NodeId x, double rate, DropoutMode mode, RngStream& rng);

  /// Identity forward; backward multiplies the upstream gradient by -lambda.
  NodeId grad_reverse(NodeId x, double lambda);

  /// Mean over rows of -log softmax(logits)[label], with max-subtraction and
  /// probabilities clamped at 1e-12 inside the log. Output is a scalar node.
  NodeId softmax_cross_entropy(NodeId logits, std::span<const int> labels);

  /// Elementwise sum of two same-shape nodes.
  NodeId add(NodeId a, NodeId b);

  /// Multiplies every element by a constant factor.
  NodeId scale(NodeId x, double factor);

  /// Seeds d(root) = 1 and sweeps the tape once in reverse, accumulating
  /// parameter gradients into their ParameterSet. `root` must be scalar.
  void backward(NodeId root);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }

  /// Gradient of the last backward() root w.r.t. this node.
  const Tensor& gradient(NodeId id) const { return nodes_[id].grad; }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Op op;
    NodeId a = 0;
    NodeId b = 0;
    bool has_a = false;
    bool has_b = false;
    Tensor value;
    Tensor grad;
    Tensor aux;               // dropout mask / cached softmax probabilities
    double scalar = 0.0;      // dropout rate, reversal lambda, scale factor
    std::vector<int> labels;  // cross-entropy targets
    ParameterSet* params = nullptr;
    std::size_t param_index = 0;
  };

  NodeId push(Node node);
  static const char* op_name(Op op);

  std::vector<Node> nodes_;
};

}  // namespace fairal
