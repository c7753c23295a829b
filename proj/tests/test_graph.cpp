#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ogdl/graph.hpp"
#include "ogdl/rng.hpp"

using namespace ogdl;

TEST_CASE("affine with identity weight and zero bias is the identity") {
  Graph g;
  const NodeId w = g.constant(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  const NodeId b = g.constant(Tensor::zeros({2}));
  const NodeId x = g.input("x", {2});
  const NodeId y = g.affine(w, x, b);
  Bindings bind{{"x", Tensor::vec({1, 2})}};
  const Evaluation ev = evaluate(g, bind);
  CHECK(ev.value(y)[0] == 1.0);
  CHECK(ev.value(y)[1] == 2.0);
}

TEST_CASE("softmax of zeros is uniform") {
  Graph g;
  const NodeId y = g.softmax(g.constant(Tensor::vec({0, 0})));
  const Evaluation ev = evaluate(g, {});
  CHECK(ev.value(y)[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(ev.value(y)[1] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("cross-entropy of a uniform 2-class prediction is ln 2") {
  // -sum(onehot * log p) with p = (0.5, 0.5)
  Graph g;
  const NodeId p = g.constant(Tensor::vec({0.5, 0.5}));
  const NodeId onehot = g.constant(Tensor::vec({0, 1}));
  const NodeId loss = g.scale(g.sum(g.mul(g.log_clamped(p), onehot)), -1.0);
  CHECK(evaluate(g, {}).scalar(loss) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("evaluate rejects unbound leaves and bad shapes") {
  Graph g;
  const NodeId x = g.input("x", {2});
  g.sum(x);
  CHECK_THROWS_AS(evaluate(g, {}), ConfigError);
  Bindings wrong{{"x", Tensor::vec({1, 2, 3})}};
  CHECK_THROWS_AS(evaluate(g, wrong), ShapeError);
  Graph g2;
  const NodeId a = g2.input("a", {2});
  const NodeId b = g2.input("b", {3});
  CHECK_THROWS_AS(g2.add(a, b), ShapeError);
}

TEST_CASE("evaluate flags non-finite results") {
  Graph g;
  NodeId x = g.constant(Tensor::scalar(1e300));
  x = g.mul(x, x);  // overflows to inf
  g.sum(x);
  CHECK_THROWS_AS(evaluate(g, {}), NumericError);
}

TEST_CASE("evaluate is referentially transparent") {
  Graph g;
  Rng rng(7);
  const NodeId w = g.param("w", {3, 4});
  const NodeId b = g.param("b", {3});
  const NodeId x = g.input("x", {4});
  const NodeId y = g.softmax(g.affine(w, g.relu(x), b));
  g.sum(y);
  Bindings bind;
  Tensor wt = Tensor::zeros({3, 4}), bt = Tensor::zeros({3}), xt = Tensor::zeros({4});
  for (double& v : wt.values) v = rng.gaussian();
  for (double& v : bt.values) v = rng.gaussian();
  for (double& v : xt.values) v = rng.gaussian();
  bind.emplace("w", wt);
  bind.emplace("b", bt);
  bind.emplace("x", xt);
  const Evaluation e1 = evaluate(g, bind);
  const Evaluation e2 = evaluate(g, bind);
  REQUIRE(e1.values.size() == e2.values.size());
  for (std::size_t i = 0; i < e1.values.size(); ++i) CHECK(e1.values[i].same_bits(e2.values[i]));
}

TEST_CASE("gradient of sum(x^2) is 2x") {
  Graph g;
  const NodeId x = g.param("x", {3});
  const NodeId loss = g.sum(g.mul(x, x));
  Bindings bind{{"x", Tensor::vec({1, -2, 3})}};
  const GradientMap grads = gradients(g, loss, bind, {"x"});
  REQUIRE(grads.count("x") == 1);
  const Tensor& gx = grads.at("x");
  CHECK(gx[0] == Catch::Approx(2.0));
  CHECK(gx[1] == Catch::Approx(-4.0));
  CHECK(gx[2] == Catch::Approx(6.0));
}

TEST_CASE("softmax cross-entropy gradient at uniform prediction") {
  // logits (0,0), true class 0: dL/dlogits = p - onehot = (-0.5, +0.5)
  Graph g;
  const NodeId z = g.param("z", {2});
  const NodeId p = g.softmax(z);
  const NodeId onehot = g.constant(Tensor::vec({1, 0}));
  const NodeId loss = g.scale(g.sum(g.mul(g.log_clamped(p), onehot)), -1.0);
  Bindings bind{{"z", Tensor::vec({0, 0})}};
  const GradientMap grads = gradients(g, loss, bind, {"z"});
  CHECK(grads.at("z")[0] == Catch::Approx(-0.5).margin(1e-12));
  CHECK(grads.at("z")[1] == Catch::Approx(0.5).margin(1e-12));
  CHECK(finite_difference_check(g, loss, bind, 1e-5) < 1e-4);
}

TEST_CASE("gradients with empty wrt returns an empty map") {
  Graph g;
  const NodeId x = g.param("x", {2});
  const NodeId loss = g.sum(g.mul(x, x));
  Bindings bind{{"x", Tensor::vec({1, 2})}};
  CHECK(gradients(g, loss, bind, {}).empty());
}

TEST_CASE("gradients validates loss shape and wrt membership") {
  Graph g;
  const NodeId x = g.param("x", {2});
  const NodeId y = g.mul(x, x);
  const NodeId loss = g.sum(y);
  Bindings bind{{"x", Tensor::vec({1, 2})}};
  CHECK_THROWS_AS(gradients(g, y, bind, {"x"}), ConfigError);        // non-scalar
  CHECK_THROWS_AS(gradients(g, loss, bind, {"nope"}), ConfigError);  // unknown leaf
}

TEST_CASE("requested leaf off the loss path gets a zero entry") {
  Graph g;
  const NodeId x = g.param("x", {2});
  const NodeId other = g.param("other", {3});
  (void)other;
  const NodeId loss = g.sum(g.mul(x, x));
  Bindings bind{{"x", Tensor::vec({1, 2})}, {"other", Tensor::vec({5, 5, 5})}};
  const GradientMap grads = gradients(g, loss, bind, {"x", "other"});
  REQUIRE(grads.count("other") == 1);
  for (double v : grads.at("other").values) CHECK(v == 0.0);
}

TEST_CASE("gradient accumulates over shared subexpressions") {
  // loss = sum(x*x) + sum(x) uses x twice
  Graph g;
  const NodeId x = g.param("x", {2});
  const NodeId loss = g.add(g.sum(g.mul(x, x)), g.sum(x));
  Bindings bind{{"x", Tensor::vec({3, -1})}};
  const GradientMap grads = gradients(g, loss, bind, {"x"});
  CHECK(grads.at("x")[0] == Catch::Approx(7.0));   // 2*3 + 1
  CHECK(grads.at("x")[1] == Catch::Approx(-1.0));  // 2*(-1) + 1
}

TEST_CASE("gradient linearity") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g;
    const NodeId x = g.param("x", {4});
    const NodeId l1 = g.sum(g.mul(x, x));
    const NodeId l2 = g.mean(g.relu(x));
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const NodeId combo = g.add(g.scale(l1, a), g.scale(l2, b));
    Tensor xt = Tensor::zeros({4});
    for (double& v : xt.values) v = rng.gaussian() + 0.05;  // keep off the relu kink
    Bindings bind{{"x", xt}};
    const Evaluation ev = evaluate(g, bind);
    const GradientMap g1 = gradients(g, l1, ev, {"x"});
    const GradientMap g2 = gradients(g, l2, ev, {"x"});
    const GradientMap gc = gradients(g, combo, ev, {"x"});
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::fabs(gc.at("x")[i] - (a * g1.at("x")[i] + b * g2.at("x")[i])) < 1e-10);
  }
}

TEST_CASE("squared distance, concat, hinge backward vs finite differences") {
  Graph g;
  const NodeId a = g.param("a", {3});
  const NodeId b = g.param("b", {3});
  const NodeId d = g.squared_distance(a, g.scale(b, 0.5));
  const NodeId cat = g.concat(g.relu(a), b);
  const NodeId loss = g.add(g.hinge(g.add(d, g.constant(Tensor::scalar(-0.7)))), g.mean(g.mul(cat, cat)));
  Bindings bind{{"a", Tensor::vec({0.4, -1.3, 0.9})}, {"b", Tensor::vec({1.1, 0.2, -0.5})}};
  CHECK(finite_difference_check(g, loss, bind, 1e-5) < 1e-6);
}

TEST_CASE("finite differences are near-exact for quadratics") {
  Graph g;
  const NodeId x = g.param("x", {3});
  const NodeId loss = g.sum(g.mul(x, x));
  Bindings bind{{"x", Tensor::vec({0.3, -1.7, 2.2})}};
  CHECK(finite_difference_check(g, loss, bind, 1e-4) < 1e-8);
}

TEST_CASE("finite difference step must be positive") {
  Graph g;
  const NodeId x = g.param("x", {1});
  const NodeId loss = g.sum(x);
  Bindings bind{{"x", Tensor::vec({1})}};
  CHECK_THROWS_AS(finite_difference_check(g, loss, bind, 0.0), ConfigError);
}

// Random two-layer networks with softmax cross-entropy; inputs are nudged
// away from relu kinks before checking.
TEST_CASE("random two-layer networks pass the finite-difference oracle") {
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(split_seed(1234, trial));
    const std::size_t in = 2 + rng.index(4), hid = 2 + rng.index(5), out = 2 + rng.index(3);
    Graph g;
    const NodeId w1 = g.param("w1", {hid, in});
    const NodeId b1 = g.param("b1", {hid});
    const NodeId w2 = g.param("w2", {out, hid});
    const NodeId b2 = g.param("b2", {out});
    const NodeId x = g.input("x", {in});
    const NodeId h = g.relu(g.affine(w1, x, b1));
    const NodeId p = g.softmax(g.affine(w2, h, b2));
    Tensor onehot = Tensor::zeros({out});
    onehot[rng.index(out)] = 1.0;
    const NodeId loss = g.scale(g.sum(g.mul(g.log_clamped(p), g.constant(onehot))), -1.0);

    Bindings bind;
    auto fill = [&](const char* name, const Shape& s) {
      Tensor t = Tensor::zeros(s);
      for (double& v : t.values) v = rng.uniform(-1, 1);
      bind.emplace(name, std::move(t));
    };
    fill("w1", {hid, in});
    fill("b1", {hid});
    fill("w2", {out, hid});
    fill("b2", {out});
    Tensor xt = Tensor::zeros({in});
    for (double& v : xt.values) {
      v = rng.gaussian();
      if (std::fabs(v) < 1e-3) v += 1e-3;  // keep clear of the kink
    }
    bind.emplace("x", xt);

    worst = std::max(worst, finite_difference_check(g, loss, bind, 1e-5));
  }
  CHECK(worst < 1e-4);
}
