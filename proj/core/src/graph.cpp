#include "fairal/graph.hpp"

#include <cmath>
#include <string>

#include "fairal/errors.hpp"

namespace fairal {

namespace {
constexpr double kLogClamp = 1e-12;
}

const char* Graph::op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kParam: return "param";
    case Op::kMatmul: return "matmul";
    case Op::kAddRowBias: return "add_row_bias";
    case Op::kRelu: return "relu";
    case Op::kDropout: return "dropout";
    case Op::kGradReverse: return "grad_reverse";
    case Op::kSoftmaxCrossEntropy: return "softmax_cross_entropy";
    case Op::kAdd: return "add";
    case Op::kScale: return "scale";
  }
  return "?";
}

NodeId Graph::push(Node node) {
  if (!node.value.all_finite()) {
    throw TrainingError(std::string("non-finite values in forward op ") +
                        op_name(node.op));
  }
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::input(Tensor value) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Graph::param(ParameterSet& params, std::size_t index) {
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].op == Op::kParam && nodes_[id].params == &params &&
        nodes_[id].param_index == index) {
      return id;
    }
  }
  Node n;
  n.op = Op::kParam;
  n.params = &params;
  n.param_index = index;
  n.value = params[index].value;
  return push(std::move(n));
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& A = nodes_[a].value;
  const Tensor& B = nodes_[b].value;
  if (A.cols() != B.rows()) {
    throw ShapeError("matmul: inner dimensions disagree");
  }
  std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  Node out;
  out.op = Op::kMatmul;
  out.a = a;
  out.b = b;
  out.has_a = out.has_b = true;
  out.value = Tensor({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += A.at(i, t) * B.at(t, j);
      out.value.at(i, j) = s;
    }
  }
  return push(std::move(out));
}

NodeId Graph::add_row_bias(NodeId x, NodeId bias) {
  const Tensor& X = nodes_[x].value;
  const Tensor& B = nodes_[bias].value;
  if (B.rank() != 1 || B.size() != X.cols()) {
    throw ShapeError("add_row_bias: bias length must equal column count");
  }
  Node out;
  out.op = Op::kAddRowBias;
  out.a = x;
  out.b = bias;
  out.has_a = out.has_b = true;
  out.value = X;
  std::size_t n = X.rows(), m = X.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out.value.at(i, j) += B[j];
  }
  return push(std::move(out));
}

NodeId Graph::relu(NodeId x) {
  Node out;
  out.op = Op::kRelu;
  out.a = x;
  out.has_a = true;
  out.value = nodes_[x].value;
  for (double& v : out.value.values()) v = v > 0.0 ? v : 0.0;
  return push(std::move(out));
}

NodeId Graph::dropout(NodeId x, double rate, DropoutMode mode,
                      RngStream& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must satisfy 0 <= rate < 1");
  }
  Node out;
  out.op = Op::kDropout;
  out.a = x;
  out.has_a = true;
  out.scalar = rate;
  out.value = nodes_[x].value;
  if (mode == DropoutMode::kTrain) {
    double keep_scale = 1.0 / (1.0 - rate);
    out.aux = Tensor(out.value.shape());
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      double m = rng.uniform01() < rate ? 0.0 : keep_scale;
      out.aux[i] = m;
      out.value[i] *= m;
    }
  }
  // Eval mode: identity, no mask drawn.
  return push(std::move(out));
}

NodeId Graph::grad_reverse(NodeId x, double lambda) {
  if (lambda < 0.0) throw ConfigError("grad_reverse lambda must be >= 0");
  Node out;
  out.op = Op::kGradReverse;
  out.a = x;
  out.has_a = true;
  out.scalar = lambda;
  out.value = nodes_[x].value;
  return push(std::move(out));
}

NodeId Graph::softmax_cross_entropy(NodeId logits,
                                    std::span<const int> labels) {
  const Tensor& L = nodes_[logits].value;
  std::size_t n = L.rows(), c = L.cols();
  if (labels.size() != n) {
    throw ShapeError("softmax_cross_entropy: one label per row required");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw IndexError("softmax_cross_entropy: label out of range");
    }
  }
  Node out;
  out.op = Op::kSoftmaxCrossEntropy;
  out.a = logits;
  out.has_a = true;
  out.labels.assign(labels.begin(), labels.end());
  out.aux = softmax_rows(L);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = out.aux.at(i, static_cast<std::size_t>(labels[i]));
    total += -std::log(p < kLogClamp ? kLogClamp : p);
  }
  out.value = Tensor::scalar(total / static_cast<double>(n));
  return push(std::move(out));
}

NodeId Graph::add(NodeId a, NodeId b) {
  if (!nodes_[a].value.same_shape(nodes_[b].value)) {
    throw ShapeError("add: shape mismatch");
  }
  Node out;
  out.op = Op::kAdd;
  out.a = a;
  out.b = b;
  out.has_a = out.has_b = true;
  out.value = nodes_[a].value;
  const Tensor& B = nodes_[b].value;
  for (std::size_t i = 0; i < out.value.size(); ++i) out.value[i] += B[i];
  return push(std::move(out));
}

NodeId Graph::scale(NodeId x, double factor) {
  Node out;
  out.op = Op::kScale;
  out.a = x;
  out.has_a = true;
  out.scalar = factor;
  out.value = nodes_[x].value;
  for (double& v : out.value.values()) v *= factor;
  return push(std::move(out));
}

void Graph::backward(NodeId root) {
  if (root >= nodes_.size()) throw IndexError("backward: bad root node");
  if (nodes_[root].value.size() != 1) {
    throw ShapeError("backward: root must be scalar");
  }
  for (NodeId id = 0; id <= root; ++id) {
    nodes_[id].grad = Tensor(nodes_[id].value.shape());
  }
  nodes_[root].grad[0] = 1.0;

  for (NodeId id = root + 1; id-- > 0;) {
    Node& node = nodes_[id];
    const Tensor& g = node.grad;
    switch (node.op) {
      case Op::kInput:
        break;
      case Op::kParam: {
        auto& slot = (*node.params)[node.param_index].grad;
        for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
        break;
      }
      case Op::kMatmul: {
        const Tensor& A = nodes_[node.a].value;
        const Tensor& B = nodes_[node.b].value;
        Tensor& dA = nodes_[node.a].grad;
        Tensor& dB = nodes_[node.b].grad;
        std::size_t n = A.rows(), k = A.cols(), m = B.cols();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t t = 0; t < k; ++t) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += g.at(i, j) * B.at(t, j);
            dA.at(i, t) += s;
          }
        }
        for (std::size_t t = 0; t < k; ++t) {
          for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += A.at(i, t) * g.at(i, j);
            dB.at(t, j) += s;
          }
        }
        break;
      }
      case Op::kAddRowBias: {
        Tensor& dX = nodes_[node.a].grad;
        Tensor& dBias = nodes_[node.b].grad;
        std::size_t n = node.value.rows(), m = node.value.cols();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            dX.at(i, j) += g.at(i, j);
            dBias[j] += g.at(i, j);
          }
        }
        break;
      }
      case Op::kRelu: {
        const Tensor& X = nodes_[node.a].value;
        Tensor& dX = nodes_[node.a].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (X[i] > 0.0) dX[i] += g[i];
        }
        break;
      }
      case Op::kDropout: {
        Tensor& dX = nodes_[node.a].grad;
        if (node.aux.empty()) {  // eval mode
          for (std::size_t i = 0; i < g.size(); ++i) dX[i] += g[i];
        } else {
          for (std::size_t i = 0; i < g.size(); ++i) {
            dX[i] += g[i] * node.aux[i];
          }
        }
        break;
      }
      case Op::kGradReverse: {
        Tensor& dX = nodes_[node.a].grad;
        double neg_lambda = -node.scalar;
        for (std::size_t i = 0; i < g.size(); ++i) {
          dX[i] += neg_lambda * g[i];
        }
        break;
      }
      case Op::kSoftmaxCrossEntropy: {
        Tensor& dL = nodes_[node.a].grad;
        const Tensor& probs = node.aux;
        std::size_t n = probs.rows(), c = probs.cols();
        double scale = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < c; ++j) {
            double delta = (static_cast<std::size_t>(node.labels[i]) == j)
                               ? 1.0
                               : 0.0;
            dL.at(i, j) += scale * (probs.at(i, j) - delta);
          }
        }
        break;
      }
      case Op::kAdd: {
        Tensor& dA = nodes_[node.a].grad;
        Tensor& dB = nodes_[node.b].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          dA[i] += g[i];
          dB[i] += g[i];
        }
        break;
      }
      case Op::kScale: {
        Tensor& dX = nodes_[node.a].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          dX[i] += node.scalar * g[i];
        }
        break;
      }
    }
  }
}

}  // namespace fairal
