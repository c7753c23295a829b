#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ogdl/losses.hpp"
#include "ogdl/rng.hpp"

using namespace ogdl;

namespace {

// random rotation assembled from Givens rotations; orthogonal to fp precision
Tensor rotate(const Tensor& v, std::uint64_t seed) {
  Tensor out = v;
  Rng rng(seed);
  const std::size_t d = v.numel();
  for (std::size_t k = 0; k < 3 * d; ++k) {
    const std::size_t i = rng.index(d);
    std::size_t j = rng.index(d - 1);
    if (j >= i) ++j;
    const double th = rng.uniform(0, 2 * 3.14159265358979323846);
    const double c = std::cos(th), s = std::sin(th);
    const double vi = out[i], vj = out[j];
    out[i] = c * vi - s * vj;
    out[j] = s * vi + c * vj;
  }
  return out;
}

Tensor random_probs(Rng& rng, std::size_t k) {
  Tensor p = Tensor::zeros({k});
  double sum = 0.0;
  for (double& v : p.values) {
    v = rng.uniform(0.01, 1.0);
    sum += v;
  }
  for (double& v : p.values) v /= sum;
  return p;
}

}  // namespace

TEST_CASE("classification loss hand values") {
  CHECK(classification_loss(Tensor::vec({0.5, 0.5}), 0) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(classification_loss(Tensor::vec({1.0, 0.0}), 0) == Catch::Approx(0.0).margin(1e-6));
  CHECK(classification_loss(Tensor::vec({0.9, 0.1}), 1) == Catch::Approx(-std::log(0.1)).epsilon(1e-12));
  CHECK_THROWS_AS(classification_loss(Tensor::vec({0.5, 0.5}), 2), ConfigError);
  CHECK_THROWS_AS(classification_loss(Tensor::vec({0.9, 0.6}), 0), ConfigError);
}

TEST_CASE("discriminative loss hand values and permutation symmetry") {
  const double third = 1.0 / 3.0;
  CHECK(discriminative_loss(Tensor::vec({third, third, third}), 2) ==
        Catch::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(discriminative_loss(Tensor::vec({0.7, 0.2, 0.1}), 0) ==
        Catch::Approx(-std::log(0.7)).epsilon(1e-12));
  // permuting (d, y) jointly leaves the value unchanged
  CHECK(discriminative_loss(Tensor::vec({0.2, 0.1, 0.7}), 2) ==
        discriminative_loss(Tensor::vec({0.7, 0.2, 0.1}), 0));
}

TEST_CASE("adversarial loss: uniform minimum and clamped extreme") {
  const double third = 1.0 / 3.0;
  CHECK(adversarial_loss(Tensor::vec({third, third, third})) ==
        Catch::Approx(std::log(3.0)).epsilon(1e-12));
  // one-hot under the 1e-7 clamp: (1/3)(-log(1-1e-7) - 2 log(1e-7))
  const double expected = (-std::log(1.0 - 1e-7) - 2.0 * std::log(1e-7)) / 3.0;
  CHECK(adversarial_loss(Tensor::vec({1.0, 0.0, 0.0})) == Catch::Approx(expected).epsilon(1e-12));
  CHECK(expected == Catch::Approx(10.745).margin(5e-4));
  // permutation invariance
  Rng rng(3);
  const Tensor p = random_probs(rng, 3);
  CHECK(adversarial_loss(Tensor::vec({p[2], p[0], p[1]})) == Catch::Approx(adversarial_loss(p)).epsilon(1e-12));
}

TEST_CASE("adversarial loss is at least ln K with equality only at uniform") {
  Rng rng(17);
  const double ln3 = std::log(3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Tensor p = random_probs(rng, 3);
    const double v = adversarial_loss(p);
    CHECK(v >= ln3 - 1e-6);
    double max_dev = 0.0;
    for (double e : p.values) max_dev = std::max(max_dev, std::fabs(e - 1.0 / 3));
    if (max_dev > 1e-2) CHECK(v > ln3 + 1e-6);
  }
  // printed compatibility form: minimized by a one-hot, not by uniform
  const Tensor uniform = Tensor::vec({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const Tensor onehot = Tensor::vec({1.0, 0.0, 0.0});
  CHECK(adversarial_loss(onehot, AdvForm::PrintedSum) < adversarial_loss(uniform, AdvForm::PrintedSum));
}

TEST_CASE("ordinal loss hand values") {
  CHECK(ordinal_loss(Tensor::vec({0, 0}), Tensor::vec({1, 0}), Tensor::vec({3, 0}), 1.0) == 0.0);
  CHECK(ordinal_loss(Tensor::vec({0, 0}), Tensor::vec({2, 0}), Tensor::vec({1, 0}), 0.5) ==
        Catch::Approx(3.5).epsilon(1e-12));
  // equal distances leave exactly the margin
  CHECK(ordinal_loss(Tensor::vec({0.3, -1}), Tensor::vec({1, 2}), Tensor::vec({1, 2}), 0.25) ==
        Catch::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(ordinal_loss(Tensor::vec({0, 0}), Tensor::vec({1}), Tensor::vec({1, 0}), 0.5), ShapeError);
}

TEST_CASE("ordinal loss zero/positive regions and rotation invariance") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor a = Tensor::zeros({4}), b = Tensor::zeros({4}), c = Tensor::zeros({4});
    for (std::size_t i = 0; i < 4; ++i) {
      a[i] = rng.gaussian();
      b[i] = rng.gaussian();
      c[i] = rng.gaussian();
    }
    const double eps = rng.uniform(0, 1);
    const double gap = squared_distance(a, b) - squared_distance(a, c) + eps;
    const double loss = ordinal_loss(a, b, c, eps);
    if (gap <= 0.0)
      CHECK(loss == 0.0);
    else
      CHECK(loss == Catch::Approx(gap).epsilon(1e-12));
    // any common rigid rotation leaves the value unchanged
    const std::uint64_t rs = split_seed(99, trial);
    CHECK(std::fabs(ordinal_loss(rotate(a, rs), rotate(b, rs), rotate(c, rs), eps) - loss) < 1e-9);
  }
}

TEST_CASE("graph loss builders match the plain evaluations") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor p = random_probs(rng, 3);
    const std::size_t y = rng.index(3);
    Graph g;
    const NodeId pn = g.constant(p);
    const NodeId ce = cross_entropy_node(g, pn, y);
    const NodeId advu = adversarial_node(g, pn, AdvForm::UniformTarget);
    const NodeId advp = adversarial_node(g, pn, AdvForm::PrintedSum);
    Tensor za = Tensor::zeros({3}), zb = Tensor::zeros({3}), zc = Tensor::zeros({3});
    for (std::size_t i = 0; i < 3; ++i) {
      za[i] = rng.gaussian();
      zb[i] = rng.gaussian();
      zc[i] = rng.gaussian();
    }
    const double eps = rng.uniform(0, 1);
    const NodeId ord = ordinal_node(g, g.constant(za), g.constant(zb), g.constant(zc), eps);
    const Evaluation ev = evaluate(g, {});
    CHECK(ev.scalar(ce) == Catch::Approx(classification_loss(p, y)).epsilon(1e-12));
    CHECK(ev.scalar(advu) == Catch::Approx(adversarial_loss(p)).epsilon(1e-12));
    CHECK(ev.scalar(advp) == Catch::Approx(adversarial_loss(p, AdvForm::PrintedSum)).epsilon(1e-12));
    CHECK(ev.scalar(ord) == Catch::Approx(ordinal_loss(za, zb, zc, eps)).margin(1e-12));
  }
}

namespace {

NetworkConfig tiny_config() {
  NetworkConfig cfg;
  cfg.input_dim = 4;
  cfg.encoder_widths = {5};
  cfg.branch_widths = {4};
  cfg.z_dim = 3;
  return cfg;
}

BatchRecord record(Rng& rng, const NetworkConfig& cfg, int loc, std::optional<int> uc) {
  BatchRecord r;
  r.features = Tensor::zeros({cfg.input_dim});
  for (double& v : r.features.values) v = rng.gaussian();
  r.location = loc;
  r.uc = uc;
  return r;
}

}  // namespace

TEST_CASE("batch losses: masking edge cases") {
  const NetworkConfig cfg = tiny_config();
  const ParamSet params = init(cfg, 11);
  Rng rng(5);

  Batch no_uc;
  no_uc.fragments.push_back({{record(rng, cfg, 0, std::nullopt), record(rng, cfg, 1, std::nullopt)}});
  const LossBundle b = batch_losses(params, cfg, no_uc, {});
  CHECK(b.c_u == 0.0);
  CHECK(b.d_u == 0.0);
  CHECK(b.adv_u == 0.0);
  CHECK(b.n_c_u == 0);
  CHECK(b.n_d_u == 0);
  CHECK(b.n_adv_u == 0);
  CHECK(b.n_c_loc == 2);

  Batch single;
  single.fragments.push_back({{record(rng, cfg, 2, 1)}});
  const LossBundle s = batch_losses(params, cfg, single, {});
  CHECK(s.seq == 0.0);
  CHECK(s.n_seq == 0);

  Batch empty;
  CHECK_THROWS_AS(batch_losses(params, cfg, empty, {}), ConfigError);
}

TEST_CASE("batch losses on zero-weight heads reproduce the uniform values") {
  const NetworkConfig cfg = tiny_config();
  ParamSet params = init(cfg, 13);
  for (Group g : {Group::C_u, Group::C_loc, Group::D_u, Group::D_loc})
    for (Tensor& t : params.group(g))
      for (double& v : t.values) v = 0.0;
  Rng rng(7);
  Batch batch;
  batch.fragments.push_back({{record(rng, cfg, 1, 0)}});
  const LossBundle b = batch_losses(params, cfg, batch, {});
  CHECK(b.c_u == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(b.c_loc == Catch::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(b.d_loc == Catch::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(b.d_u == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(b.adv_u == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(b.adv_loc == Catch::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("loss bundle terms do not depend on the weights") {
  // scaling lambda_seq to 0 must reproduce the disentangle-only bundle term by term
  const NetworkConfig cfg = tiny_config();
  const ParamSet params = init(cfg, 17);
  Rng rng(23);
  Batch batch;
  Fragment f;
  for (int t = 0; t < 4; ++t) f.records.push_back(record(rng, cfg, t < 2 ? 0 : 1, t % 2 ? std::optional<int>(1) : std::nullopt));
  batch.fragments.push_back(f);

  LossWeights with_seq;
  LossWeights no_seq;
  no_seq.lambda_seq = 0.0;
  const LossBundle a = batch_losses(params, cfg, batch, with_seq);
  const LossBundle b = batch_losses(params, cfg, batch, no_seq);
  CHECK(a.c_u == b.c_u);
  CHECK(a.c_loc == b.c_loc);
  CHECK(a.d_u == b.d_u);
  CHECK(a.d_loc == b.d_loc);
  CHECK(a.adv_u == b.adv_u);
  CHECK(a.adv_loc == b.adv_loc);
  CHECK(a.n_seq == b.n_seq);  // the term itself is still measured
}

TEST_CASE("batch loss terms are non-negative and triples counted per fragment") {
  const NetworkConfig cfg = tiny_config();
  const ParamSet params = init(cfg, 19);
  Rng rng(37);
  Batch batch;
  Fragment f1, f2;
  for (int t = 0; t < 5; ++t) f1.records.push_back(record(rng, cfg, 0, 1));
  for (int t = 0; t < 2; ++t) f2.records.push_back(record(rng, cfg, 2, 0));
  batch.fragments.push_back(f1);
  batch.fragments.push_back(f2);
  const LossBundle b = batch_losses(params, cfg, batch, {});
  CHECK(b.n_seq == 3);  // 5-record fragment: 3 triples; 2-record fragment: none
  for (double v : {b.c_u, b.c_loc, b.d_u, b.d_loc, b.adv_u, b.adv_loc, b.seq}) CHECK(v >= 0.0);
}

TEST_CASE("routing: a step on one loss term touches only its groups") {
  const NetworkConfig cfg = tiny_config();
  const ParamSet params = init(cfg, 29);
  Rng rng(41);
  Batch batch;
  Fragment f;
  for (int t = 0; t < 4; ++t) f.records.push_back(record(rng, cfg, 1, t % 2));
  batch.fragments.push_back(f);

  Graph g;
  NetGraphBuilder net(g, cfg);
  const BatchLossNodes nodes = build_batch_losses(g, net, batch, {});
  const Bindings bind = bindings_from(params);

  auto step_changes = [&](NodeId loss, const std::set<std::string>& groups) {
    ParamSet updated = params;
    const GradientMap grads = gradients(g, loss, bind, group_params(params, groups));
    for (std::size_t gi = 0; gi < kGroupCount; ++gi)
      for (std::size_t i = 0; i < updated.groups[gi].size(); ++i) {
        const std::string name = param_leaf_name(static_cast<Group>(gi), i);
        auto it = grads.find(name);
        if (it == grads.end()) continue;
        Tensor& t = updated.groups[gi][i];
        for (std::size_t k = 0; k < t.numel(); ++k) t[k] -= 0.1 * it->second[k];
      }
    return updated;
  };

  // L_d_loc alone: only D_loc moves
  ParamSet after = step_changes(nodes.d_loc, {"D_loc"});
  for (std::size_t gi = 0; gi < kGroupCount; ++gi) {
    const Group grp = static_cast<Group>(gi);
    if (grp == Group::D_loc)
      CHECK_FALSE(after.group_same_bits(params, grp));
    else
      CHECK(after.group_same_bits(params, grp));
  }

  // L_adv_loc with D frozen: only E and B_u move
  after = step_changes(nodes.adv_loc, {"E", "B_u"});
  for (std::size_t gi = 0; gi < kGroupCount; ++gi) {
    const Group grp = static_cast<Group>(gi);
    if (grp == Group::E || grp == Group::B_u)
      CHECK_FALSE(after.group_same_bits(params, grp));
    else
      CHECK(after.group_same_bits(params, grp));
  }

  // mirrored "u" versions
  after = step_changes(nodes.d_u, {"D_u"});
  CHECK_FALSE(after.group_same_bits(params, Group::D_u));
  CHECK(after.group_same_bits(params, Group::E));
  after = step_changes(nodes.adv_u, {"E", "B_loc"});
  CHECK_FALSE(after.group_same_bits(params, Group::B_loc));
  CHECK(after.group_same_bits(params, Group::D_u));
}

TEST_CASE("full objective passes the finite-difference oracle") {
  const NetworkConfig cfg = tiny_config();
  const ParamSet params = init(cfg, 53);
  Rng rng(59);
  Batch batch;
  Fragment f;
  for (int t = 0; t < 4; ++t) f.records.push_back(record(rng, cfg, t % 3, t % 2));
  batch.fragments.push_back(f);

  Graph g;
  NetGraphBuilder net(g, cfg);
  const BatchLossNodes nodes = build_batch_losses(g, net, batch, {});
  const Bindings bind = bindings_from(params);
  CHECK(finite_difference_check(g, nodes.main_step, bind, 1e-5) < 1e-4);
  CHECK(finite_difference_check(g, nodes.d_step, bind, 1e-5) < 1e-4);
}

TEST_CASE("loss weights validate their ranges") {
  LossWeights w;
  w.lambda_adv = -0.1;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}
