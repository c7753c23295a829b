#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "ogdl/graph.hpp"
#include "ogdl/losses.hpp"
#include "ogdl/rng.hpp"
#include "ogdl/tensor.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Linear probe: a fresh affine+softmax classifier trained on frozen features
// to measure what information those features expose. The network under test
// is never touched; only the captured feature tensors enter.
// ---------------------------------------------------------------------------

struct ProbeConfig {
  std::size_t epochs = 200;     // full-batch gradient steps
  double learning_rate = 0.1;
  double train_fraction = 0.7;  // rest is the held-out evaluation set
};

// Trains on a seeded train/held-out split of (features, labels) and returns
// held-out accuracy in [0, 1].
inline double probe_disentanglement(const std::vector<Tensor>& features, const std::vector<int>& labels,
                                    std::uint64_t seed, const ProbeConfig& cfg = {}) {
  if (features.size() != labels.size() || features.empty())
    throw ConfigError("probe: features/labels size mismatch or empty");
  const std::size_t dim = features[0].numel();
  int max_label = 0;
  for (int l : labels) max_label = std::max(max_label, l);
  const std::size_t n_classes = static_cast<std::size_t>(max_label) + 1;
  {
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw DataError("probe: single-class label set");
  }

  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t n_train =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(order.size())));

  // full-batch softmax regression on the train part, via the graph engine
  Graph g;
  const NodeId w = g.param("probe.W", {n_classes, dim});
  const NodeId b = g.param("probe.b", {n_classes});
  std::vector<NodeId> terms;
  for (std::size_t k = 0; k < n_train; ++k) {
    const std::size_t idx = order[k];
    const NodeId p = g.softmax(g.affine(w, g.constant(features[idx]), b));
    terms.push_back(cross_entropy_node(g, p, static_cast<std::size_t>(labels[idx])));
  }
  NodeId loss = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) loss = g.add(loss, terms[i]);
  loss = g.scale(loss, 1.0 / static_cast<double>(terms.size()));

  Bindings bind;
  bind.emplace("probe.W", Tensor::zeros({n_classes, dim}));
  bind.emplace("probe.b", Tensor::zeros({n_classes}));
  const std::set<std::string> wrt = {"probe.W", "probe.b"};
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    GradientMap grads = gradients(g, loss, bind, wrt);
    for (auto& [name, grad] : grads) {
      Tensor& t = bind.at(name);
      for (std::size_t i = 0; i < t.numel(); ++i) t[i] -= cfg.learning_rate * grad[i];
    }
  }

  const Tensor& wt = bind.at("probe.W");
  const Tensor& bt = bind.at("probe.b");
  std::size_t correct = 0, held = 0;
  for (std::size_t k = n_train; k < order.size(); ++k) {
    const std::size_t idx = order[k];
    std::size_t best = 0;
    double best_v = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      double v = bt[c];
      for (std::size_t d = 0; d < dim; ++d) v += wt.at2(c, d) * features[idx][d];
      if (c == 0 || v > best_v) {
        best = c;
        best_v = v;
      }
    }
    correct += (static_cast<int>(best) == labels[idx]) ? 1 : 0;
    ++held;
  }
  if (held == 0) throw ConfigError("probe: empty held-out set");
  return static_cast<double>(correct) / static_cast<double>(held);
}

}  // namespace ogdl
