#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ogdl/graph.hpp"
#include "ogdl/network.hpp"
#include "ogdl/tensor.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Objectives: classification, discriminative and adversarial losses plus the
// ordinal (order-guided) triplet loss, in two matching forms: plain
// evaluations on tensors and graph builders for training.
// ---------------------------------------------------------------------------

struct LossWeights {
  double lambda_adv = 0.1;  // weight of the adversarial terms
  double lambda_seq = 1.0;  // weight of the ordinal term
  double epsilon = 0.5;     // ordinal margin

  void validate() const {
    if (lambda_adv < 0.0 || lambda_seq < 0.0 || epsilon < 0.0)
      throw ConfigError("loss weights and margin must be non-negative");
  }
};

// The adversarial term as implemented (cross-entropy against the uniform
// distribution, minimized exactly when the head output is uniform) and the
// sum-of-logs form kept behind a compatibility switch for ablation. The
// printed sum form is minimized by a degenerate one-hot output.
enum class AdvForm { UniformTarget, PrintedSum };

inline AdvForm adv_form_from_string(const std::string& s) {
  if (s == "uniform") return AdvForm::UniformTarget;
  if (s == "printed") return AdvForm::PrintedSum;
  throw ConfigError("unknown adversarial form: " + s + " (expected uniform|printed)");
}

inline std::string to_string(AdvForm f) {
  return f == AdvForm::UniformTarget ? "uniform" : "printed";
}

namespace detail {

inline void check_probability_vector(const Tensor& p) {
  if (p.rank() != 1 || p.numel() == 0) throw ConfigError("probability vector expected");
  double sum = 0.0;
  for (double v : p.values) {
    if (!(v >= -1e-9) || !(v <= 1.0 + 1e-9)) throw ConfigError("invalid probability vector entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-6) throw ConfigError("probability vector does not sum to 1");
}

inline double log_clamped(double v) {
  return std::log(std::min(std::max(v, kProbClampLo), kProbClampHi));
}

}  // namespace detail

// -log p[y], with the probability clamp applied before the log.
inline double classification_loss(const Tensor& p, std::size_t y) {
  detail::check_probability_vector(p);
  if (y >= p.numel()) throw ConfigError("class index out of range");
  return -detail::log_clamped(p[y]);
}

// One-hot cross-entropy on a disentanglement head's prediction. Same formula
// as classification_loss; the routing contract (update only the producing D
// group) is enforced by the trainer's wrt-sets.
inline double discriminative_loss(const Tensor& d, std::size_t y) {
  return classification_loss(d, y);
}

inline double adversarial_loss(const Tensor& d, AdvForm form = AdvForm::UniformTarget) {
  detail::check_probability_vector(d);
  double acc = 0.0;
  for (double v : d.values) acc += detail::log_clamped(v);
  if (form == AdvForm::PrintedSum) return acc;
  return -acc / static_cast<double>(d.numel());
}

// max(0, ||z_t - z_t1||^2 - ||z_t - z_t2||^2 + epsilon) over the features of
// three consecutive frames; subgradient 0 at the hinge point.
inline double ordinal_loss(const Tensor& z_t, const Tensor& z_t1, const Tensor& z_t2, double epsilon) {
  if (!z_t.same_shape(z_t1) || !z_t.same_shape(z_t2)) throw ShapeError("ordinal_loss shape mismatch");
  if (epsilon < 0.0) throw ConfigError("ordinal margin must be >= 0");
  const double v = squared_distance(z_t, z_t1) - squared_distance(z_t, z_t2) + epsilon;
  return v > 0.0 ? v : 0.0;
}

// ---------------------------------------------------------------------------
// Graph builders mirroring the plain forms above.
// ---------------------------------------------------------------------------

inline NodeId cross_entropy_node(Graph& g, NodeId probs, std::size_t target) {
  const Shape& s = g.shape_of(probs);
  if (s.size() != 1 || target >= s[0]) throw ConfigError("cross_entropy_node: class index out of range");
  Tensor onehot = Tensor::zeros(s);
  onehot[target] = 1.0;
  return g.scale(g.sum(g.mul(g.log_clamped(probs), g.constant(std::move(onehot)))), -1.0);
}

inline NodeId adversarial_node(Graph& g, NodeId probs, AdvForm form = AdvForm::UniformTarget) {
  if (form == AdvForm::PrintedSum) return g.sum(g.log_clamped(probs));
  return g.scale(g.mean(g.log_clamped(probs)), -1.0);
}

inline NodeId ordinal_node(Graph& g, NodeId z_t, NodeId z_t1, NodeId z_t2, double epsilon) {
  const NodeId gap = g.sub(g.squared_distance(z_t, z_t1), g.squared_distance(z_t, z_t2));
  return g.hinge(g.add(gap, g.constant(Tensor::scalar(epsilon))));
}

// ---------------------------------------------------------------------------
// Batch-level assembly.
// ---------------------------------------------------------------------------

// One observation inside a contiguous fragment. `uc` is the UC label as
// visible to the learner; unlabeled records carry nullopt.
struct BatchRecord {
  Tensor features;
  int location = 0;
  std::optional<int> uc;
};

// Contiguous run of records from a single sequence; ordinal triples are drawn
// from consecutive positions inside one fragment and never across fragments.
struct Fragment {
  std::vector<BatchRecord> records;
};

struct Batch {
  std::vector<Fragment> fragments;

  std::size_t record_count() const {
    std::size_t n = 0;
    for (const auto& f : fragments) n += f.records.size();
    return n;
  }
};

// Scalar values of the seven loss terms, each a mean over its contributing
// samples; terms with no contributors are 0 with count 0.
struct LossBundle {
  double c_u = 0.0, c_loc = 0.0;
  double d_u = 0.0, d_loc = 0.0;
  double adv_u = 0.0, adv_loc = 0.0;
  double seq = 0.0;
  std::size_t n_c_u = 0, n_c_loc = 0, n_d_u = 0, n_d_loc = 0, n_adv_u = 0, n_adv_loc = 0, n_seq = 0;
};

// Node handles for the per-term means plus the two routed objectives.
struct BatchLossNodes {
  NodeId c_u, c_loc, d_u, d_loc, adv_u, adv_loc, seq;
  std::size_t n_c_u = 0, n_c_loc = 0, n_d_u = 0, n_d_loc = 0, n_adv_u = 0, n_adv_loc = 0, n_seq = 0;
  NodeId d_step;     // L_d_u + L_d_loc, for the D-head update
  NodeId main_step;  // L_c_u + L_c_loc + lambda_adv*(L_adv_u + L_adv_loc) + lambda_seq*L_seq
  std::vector<NetTaps> taps;  // per record, in fragment order
};

namespace detail {

// mean of scalar nodes in fixed order; zero constant when empty
inline NodeId mean_or_zero(Graph& g, const std::vector<NodeId>& terms) {
  if (terms.empty()) return g.constant(Tensor::scalar(0.0));
  NodeId acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = g.add(acc, terms[i]);
  return g.scale(acc, 1.0 / static_cast<double>(terms.size()));
}

}  // namespace detail

// Wires forward passes and all loss terms for one batch. UC-side terms
// (c_u, d_u, adv_u) contribute only for UC-labeled records; location-side
// terms contribute for every record; the ordinal term contributes one entry
// per consecutive (t, t+1, t+2) triple inside each fragment.
inline BatchLossNodes build_batch_losses(Graph& g, NetGraphBuilder& net, const Batch& batch,
                                         const LossWeights& weights,
                                         AdvForm adv_form = AdvForm::UniformTarget) {
  weights.validate();
  if (batch.record_count() == 0) throw ConfigError("batch has no location-labeled records");

  std::vector<NodeId> c_u_terms, c_loc_terms, d_u_terms, d_loc_terms, adv_u_terms, adv_loc_terms, seq_terms;
  BatchLossNodes out;

  for (const Fragment& frag : batch.fragments) {
    std::vector<NodeId> frag_z_u;
    for (const BatchRecord& rec : frag.records) {
      const NetTaps taps = net.wire(g.constant(rec.features));
      out.taps.push_back(taps);
      frag_z_u.push_back(taps.z_u);

      c_loc_terms.push_back(cross_entropy_node(g, taps.p_loc, static_cast<std::size_t>(rec.location)));
      d_loc_terms.push_back(cross_entropy_node(g, taps.d_loc, static_cast<std::size_t>(rec.location)));
      adv_loc_terms.push_back(adversarial_node(g, taps.d_loc, adv_form));
      if (rec.uc.has_value()) {
        c_u_terms.push_back(cross_entropy_node(g, taps.p_u, static_cast<std::size_t>(*rec.uc)));
        d_u_terms.push_back(cross_entropy_node(g, taps.d_u, static_cast<std::size_t>(*rec.uc)));
        adv_u_terms.push_back(adversarial_node(g, taps.d_u, adv_form));
      }
    }
    for (std::size_t t = 0; t + 2 < frag_z_u.size(); ++t)
      seq_terms.push_back(ordinal_node(g, frag_z_u[t], frag_z_u[t + 1], frag_z_u[t + 2], weights.epsilon));
  }

  out.n_c_u = c_u_terms.size();
  out.n_c_loc = c_loc_terms.size();
  out.n_d_u = d_u_terms.size();
  out.n_d_loc = d_loc_terms.size();
  out.n_adv_u = adv_u_terms.size();
  out.n_adv_loc = adv_loc_terms.size();
  out.n_seq = seq_terms.size();

  out.c_u = detail::mean_or_zero(g, c_u_terms);
  out.c_loc = detail::mean_or_zero(g, c_loc_terms);
  out.d_u = detail::mean_or_zero(g, d_u_terms);
  out.d_loc = detail::mean_or_zero(g, d_loc_terms);
  out.adv_u = detail::mean_or_zero(g, adv_u_terms);
  out.adv_loc = detail::mean_or_zero(g, adv_loc_terms);
  out.seq = detail::mean_or_zero(g, seq_terms);

  out.d_step = g.add(out.d_u, out.d_loc);
  NodeId main = g.add(out.c_u, out.c_loc);
  main = g.add(main, g.scale(g.add(out.adv_u, out.adv_loc), weights.lambda_adv));
  main = g.add(main, g.scale(out.seq, weights.lambda_seq));
  out.main_step = main;
  return out;
}

inline LossBundle read_loss_bundle(const BatchLossNodes& nodes, const Evaluation& ev) {
  LossBundle b;
  b.c_u = ev.scalar(nodes.c_u);
  b.c_loc = ev.scalar(nodes.c_loc);
  b.d_u = ev.scalar(nodes.d_u);
  b.d_loc = ev.scalar(nodes.d_loc);
  b.adv_u = ev.scalar(nodes.adv_u);
  b.adv_loc = ev.scalar(nodes.adv_loc);
  b.seq = ev.scalar(nodes.seq);
  b.n_c_u = nodes.n_c_u;
  b.n_c_loc = nodes.n_c_loc;
  b.n_d_u = nodes.n_d_u;
  b.n_d_loc = nodes.n_d_loc;
  b.n_adv_u = nodes.n_adv_u;
  b.n_adv_loc = nodes.n_adv_loc;
  b.n_seq = nodes.n_seq;
  return b;
}

// Loss terms of one batch under the given parameters.
inline LossBundle batch_losses(const ParamSet& params, const NetworkConfig& cfg, const Batch& batch,
                               const LossWeights& weights, AdvForm adv_form = AdvForm::UniformTarget) {
  Graph g;
  NetGraphBuilder net(g, cfg);
  const BatchLossNodes nodes = build_batch_losses(g, net, batch, weights, adv_form);
  return read_loss_bundle(nodes, evaluate(g, bindings_from(params)));
}

}  // namespace ogdl
