#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <doctest.h>

#include "fairal/errors.hpp"
#include "fairal/graph.hpp"
#include "fairal/params.hpp"
#include "fairal/rng.hpp"
#include "fairal/tensor.hpp"
#include "support/fd_check.hpp"
#include "support/oracles.hpp"

using namespace fairal;
using testsupport::FdReport;

namespace {

Tensor from_rows(std::size_t n, std::size_t m, std::vector<double> v) {
  Tensor t = Tensor::matrix(n, m);
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = v[i];
  return t;
}

/// Fixed random weights reducing an n x m node to 1 x 1, so any op output
/// can serve as a backward root.
struct Reducer {
  Tensor u, v;
  Reducer(std::size_t n, std::size_t m, std::uint64_t seed) {
    RngStream rng(seed);
    u = Tensor::matrix(1, n);
    v = Tensor::matrix(m, 1);
    for (auto& x : u.values()) x = rng.normal();
    for (auto& x : v.values()) x = rng.normal();
  }
  NodeId apply(Graph& g, NodeId out) const {
    return g.matmul(g.matmul(g.input(u), out), g.input(v));
  }
};

}  // namespace

TEST_CASE("tensor shapes and accessors") {
  Tensor m = Tensor::matrix(2, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.size() == 6);
  m.at(1, 2) = 5.0;
  CHECK(m[5] == 5.0);

  Tensor v = Tensor::vector(4);
  CHECK(v.rank() == 1);
  CHECK(v.rows() == 1);
  CHECK(v.cols() == 4);

  Tensor s = Tensor::scalar(3.5);
  CHECK(s.size() == 1);
  CHECK(s[0] == 3.5);

  CHECK(Tensor::matrix(2, 3).same_shape(m));
  CHECK_FALSE(Tensor::matrix(3, 2).same_shape(m));
}

TEST_CASE("softmax rows are normalized and order preserving") {
  Tensor logits = from_rows(2, 3, {1.0, 2.0, 3.0, -1.0, -1.0, -1.0});
  Tensor p = softmax_rows(logits);
  for (std::size_t r = 0; r < 2; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) sum += p.at(r, c);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(p.at(0, 2) > p.at(0, 1));
  CHECK(p.at(0, 1) > p.at(0, 0));
  CHECK(p.at(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("parameter registration and lookup") {
  ParameterSet ps;
  ps.add("w", Tensor::matrix(2, 2));
  ps.add("b", Tensor::vector(2));
  CHECK(ps.size() == 2);
  CHECK(ps.value_count() == 6);
  REQUIRE(ps.find("b") != nullptr);
  CHECK(ps.find("b")->name == "b");
  CHECK(ps.find("missing") == nullptr);
  CHECK(ps[0].grad.size() == 4);
  CHECK(ps[0].momentum.size() == 4);
}

TEST_CASE("sgd with momentum matches a hand unroll") {
  ParameterSet ps;
  Tensor w = Tensor::vector(2);
  w[0] = 1.0;
  w[1] = 2.0;
  ps.add("w", w);

  ps[0].grad[0] = 0.5;
  ps[0].grad[1] = -1.0;
  sgd_step(ps, 0.1, 0.9);
  // v = g on the first step.
  CHECK(ps[0].value[0] == 1.0 - 0.1 * 0.5);
  CHECK(ps[0].value[1] == 2.0 - 0.1 * (-1.0));
  CHECK(ps[0].grad[0] == 0.0);  // zeroed by the step
  CHECK(ps[0].momentum[0] == 0.5);

  ps[0].grad[0] = 0.25;
  ps[0].grad[1] = 0.0;
  sgd_step(ps, 0.1, 0.9);
  double v0 = 0.9 * 0.5 + 0.25;
  double v1 = 0.9 * -1.0 + 0.0;
  CHECK(ps[0].value[0] == (1.0 - 0.1 * 0.5) - 0.1 * v0);
  CHECK(ps[0].value[1] == (2.0 - 0.1 * (-1.0)) - 0.1 * v1);
}

TEST_CASE("sgd rejects non-finite gradients") {
  ParameterSet ps;
  ps.add("w", Tensor::vector(1));
  ps[0].grad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sgd_step(ps, 0.1, 0.9), TrainingError);
}

TEST_CASE("matmul forward matches a hand product") {
  Graph g;
  NodeId a = g.input(from_rows(2, 2, {1, 2, 3, 4}));
  NodeId b = g.input(from_rows(2, 2, {5, 6, 7, 8}));
  NodeId c = g.matmul(a, b);
  CHECK(g.value(c).at(0, 0) == 19.0);
  CHECK(g.value(c).at(0, 1) == 22.0);
  CHECK(g.value(c).at(1, 0) == 43.0);
  CHECK(g.value(c).at(1, 1) == 50.0);
}

TEST_CASE("add_row_bias broadcasts over rows") {
  Graph g;
  NodeId x = g.input(from_rows(2, 2, {1, 2, 3, 4}));
  Tensor bias = Tensor::vector(2);
  bias[0] = 10.0;
  bias[1] = 20.0;
  NodeId out = g.add_row_bias(x, g.input(bias));
  CHECK(g.value(out).at(0, 0) == 11.0);
  CHECK(g.value(out).at(0, 1) == 22.0);
  CHECK(g.value(out).at(1, 0) == 13.0);
  CHECK(g.value(out).at(1, 1) == 24.0);
}

TEST_CASE("relu, add and scale forwards") {
  Graph g;
  NodeId x = g.input(from_rows(1, 3, {-1.0, 0.0, 2.0}));
  NodeId r = g.relu(x);
  CHECK(g.value(r)[0] == 0.0);
  CHECK(g.value(r)[1] == 0.0);
  CHECK(g.value(r)[2] == 2.0);

  NodeId s = g.scale(x, 2.5);
  CHECK(g.value(s)[0] == -2.5);
  CHECK(g.value(s)[2] == 5.0);

  NodeId sum = g.add(x, s);
  CHECK(g.value(sum)[0] == -3.5);
  CHECK(g.value(sum)[2] == 7.0);
}

TEST_CASE("cross entropy on uniform logits is ln C and clamps extremes") {
  Graph g;
  NodeId logits = g.input(from_rows(1, 2, {0.0, 0.0}));
  std::vector<int> labels = {0};
  NodeId loss = g.softmax_cross_entropy(logits, labels);
  CHECK(g.value(loss)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // A hopeless logit margin hits the 1e-12 clamp instead of overflowing.
  Graph g2;
  NodeId far = g2.input(from_rows(1, 2, {1000.0, 0.0}));
  std::vector<int> wrong = {1};
  NodeId loss2 = g2.softmax_cross_entropy(far, wrong);
  CHECK(g2.value(loss2)[0] == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("cross entropy averages over rows") {
  Graph g;
  NodeId logits = g.input(from_rows(2, 2, {0.0, 0.0, 0.0, 0.0}));
  std::vector<int> labels = {0, 1};
  NodeId loss = g.softmax_cross_entropy(logits, labels);
  CHECK(g.value(loss)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("cross entropy rejects out-of-range labels") {
  Graph g;
  NodeId logits = g.input(from_rows(1, 2, {0.0, 0.0}));
  std::vector<int> bad = {2};
  CHECK_THROWS_AS(g.softmax_cross_entropy(logits, bad), IndexError);
  std::vector<int> negative = {-1};
  CHECK_THROWS_AS(g.softmax_cross_entropy(logits, negative), IndexError);
}

TEST_CASE("shape violations throw") {
  Graph g;
  NodeId a = g.input(Tensor::matrix(2, 3));
  NodeId b = g.input(Tensor::matrix(2, 3));
  CHECK_THROWS_AS(g.matmul(a, b), ShapeError);
  NodeId v = g.input(Tensor::vector(4));
  CHECK_THROWS_AS(g.add_row_bias(a, v), ShapeError);
  CHECK_THROWS_AS(g.backward(a), ShapeError);  // non-scalar root
}

TEST_CASE("non-finite forward values are rejected") {
  Graph g;
  Tensor bad = Tensor::vector(2);
  bad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(g.input(bad), TrainingError);
}

TEST_CASE("dropout eval mode is the identity and draws nothing") {
  RngStream rng(3);
  Graph g;
  Tensor x = testsupport::random_inputs(4, 5, rng);
  NodeId out = g.dropout(g.input(x), 0.5, DropoutMode::kEval, rng);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(g.value(out)[i] == x[i]);

  // The stream must not have advanced: replay it from scratch.
  RngStream replay(3);
  Tensor x2 = testsupport::random_inputs(4, 5, replay);
  CHECK(rng.next_u64() == replay.next_u64());
}

TEST_CASE("dropout train mode zeroes or rescales every element") {
  RngStream data_rng(4);
  Tensor x = testsupport::random_inputs(20, 50, data_rng);
  RngStream mask_rng = RngStream::named(4, "dropout");
  Graph g;
  NodeId xin = g.input(x);
  NodeId out = g.dropout(xin, 0.5, DropoutMode::kTrain, mask_rng);

  std::size_t zeros = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double o = g.value(out)[i];
    if (o == 0.0) {
      ++zeros;
    } else {
      CHECK(o == 2.0 * x[i]);  // 1 / (1 - 0.5) survivor scale
    }
  }
  double zero_frac = static_cast<double>(zeros) / static_cast<double>(x.size());
  CHECK(zero_frac > 0.4);
  CHECK(zero_frac < 0.6);

  // Backward applies the identical mask: compare against an identity graph
  // with the same reduction weights.
  Reducer red(20, 50, 99);
  g.backward(red.apply(g, out));

  Graph id;
  NodeId xid = id.input(x);
  id.backward(red.apply(id, xid));

  for (std::size_t i = 0; i < x.size(); ++i) {
    double mask = g.value(out)[i] == 0.0 ? 0.0 : 2.0;
    CHECK(g.gradient(xin)[i] == id.gradient(xid)[i] * mask);
  }
}

TEST_CASE("dropout rejects rates outside [0, 1)") {
  RngStream rng(5);
  Graph g;
  NodeId x = g.input(Tensor::matrix(1, 2));
  CHECK_THROWS_AS(g.dropout(x, 1.0, DropoutMode::kTrain, rng), ConfigError);
  CHECK_THROWS_AS(g.dropout(x, -0.1, DropoutMode::kTrain, rng), ConfigError);
}

TEST_CASE("gradient reversal is the identity forward and exactly -lambda back") {
  RngStream rng(6);
  Tensor x = testsupport::random_inputs(3, 4, rng);
  Reducer red(3, 4, 6);

  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    Graph g;
    NodeId xin = g.input(x);
    NodeId rev = g.grad_reverse(xin, lambda);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(g.value(rev)[i] == x[i]);
    g.backward(red.apply(g, rev));

    Graph id;
    NodeId xid = id.input(x);
    id.backward(red.apply(id, xid));

    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(g.gradient(xin)[i] == -lambda * id.gradient(xid)[i]);
    }
  }
}

TEST_CASE("gradients accumulate across uses and backward calls") {
  ParameterSet ps;
  Tensor w = Tensor::matrix(1, 1);
  w[0] = 3.0;
  ps.add("w", w);

  Graph g;
  NodeId p = g.param(ps, 0);
  CHECK(g.param(ps, 0) == p);  // cached, not duplicated
  NodeId doubled = g.add(p, p);
  g.backward(doubled);
  CHECK(ps[0].grad[0] == 2.0);

  // Without zero_grad a second backward adds on top.
  g.backward(doubled);
  CHECK(ps[0].grad[0] == 4.0);

  ps.zero_grad();
  CHECK(ps[0].grad[0] == 0.0);
}

TEST_CASE("finite differences confirm every op backward") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(1000 + seed);
    ParameterSet ps;
    Tensor a = testsupport::random_inputs(3, 4, rng);
    Tensor b = testsupport::random_inputs(4, 2, rng);
    Tensor bias = testsupport::random_inputs(1, 2, rng);
    Tensor c = testsupport::random_inputs(3, 2, rng);
    ps.add("a", a);
    ps.add("b", b);
    Tensor bias_v = Tensor::vector(2);
    bias_v[0] = bias[0];
    bias_v[1] = bias[1];
    ps.add("bias", bias_v);
    ps.add("c", c);
    std::vector<int> labels = {0, 1, 0};
    Reducer red(3, 2, 2000 + seed);

    // relu(a @ b + bias) * 1.7 + c, reduced to a scalar, plus a cross
    // entropy on the same pre-activation: touches matmul, add_row_bias,
    // relu, add, scale, eval-mode dropout and the loss in one tape. The two
    // scalar roots are swept separately; parameter gradients accumulate, so
    // the analytic gradient matches the sum of the two values.
    auto forward = [&](Graph& g) {
      static RngStream no_draws(0);
      NodeId z = g.add_row_bias(g.matmul(g.param(ps, 0), g.param(ps, 1)),
                                g.param(ps, 2));
      NodeId h = g.dropout(g.relu(z), 0.5, DropoutMode::kEval, no_draws);
      NodeId mix = g.add(g.scale(h, 1.7), g.param(ps, 3));
      NodeId reduced = red.apply(g, mix);
      NodeId ce = g.softmax_cross_entropy(z, labels);
      return std::pair{reduced, ce};
    };

    ps.zero_grad();
    {
      Graph g;
      auto [reduced, ce] = forward(g);
      g.backward(ce);
      g.backward(reduced);
    }
    auto loss_value = [&]() {
      Graph g;
      auto [reduced, ce] = forward(g);
      return g.value(reduced)[0] + g.value(ce)[0];
    };
    FdReport report;
    testsupport::fd_against(ps, loss_value, report);
    INFO("seed ", seed, " worst at ", report.worst_where);
    CHECK(report.worst < 1e-4);
    CHECK(report.checked >= ps.value_count());
  }
}
