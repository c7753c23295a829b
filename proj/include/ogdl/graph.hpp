#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ogdl/tensor.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Reverse-mode differentiation over small dense tensors.
//
// A Graph is an append-only list of primitive nodes; node ids are assigned in
// construction order, so ascending id order is a valid topological order.
// Graphs are immutable once built: evaluation and gradient calls take the
// bindings (leaf name -> Tensor) as arguments and share no mutable state.
// ---------------------------------------------------------------------------

enum class OpKind {
  Param,     // named trainable leaf, bound at evaluation time
  Input,     // named data leaf, bound at evaluation time, never differentiated
  Constant,  // value embedded at build time
  Affine,    // W x + b with W:[m,n], x:[n], b:[m]
  Relu,      // elementwise max(0, x); also serves as the hinge [.]+
  Softmax,   // vector -> probability vector
  LogClamped,// elementwise log(clamp(x, 1e-7, 1 - 1e-7))
  Sum,       // all entries -> scalar
  Mean,      // all entries -> scalar
  Add,       // elementwise, equal shapes
  Sub,
  Mul,
  Scale,     // x * attr
  SqDist,    // ||a - b||^2 -> scalar
  Concat,    // two vectors -> one vector
};

using NodeId = std::uint32_t;

struct Node {
  OpKind kind;
  Shape shape;
  std::vector<NodeId> inputs;
  double attr = 0.0;     // Scale factor
  std::string name;      // Param/Input leaf name
  Tensor constant;       // Constant payload
};

// Probabilities are clamped to this range before any log; the cross-entropy
// style losses diverge at 0 otherwise.
constexpr double kProbClampLo = 1e-7;
constexpr double kProbClampHi = 1.0 - 1e-7;

class Graph {
 public:
  NodeId param(std::string name, Shape shape) {
    require_fresh_leaf_name(name);
    Node n;
    n.kind = OpKind::Param;
    n.shape = std::move(shape);
    n.name = std::move(name);
    return push(std::move(n));
  }

  NodeId input(std::string name, Shape shape) {
    require_fresh_leaf_name(name);
    Node n;
    n.kind = OpKind::Input;
    n.shape = std::move(shape);
    n.name = std::move(name);
    return push(std::move(n));
  }

  NodeId constant(Tensor value) {
    Node n;
    n.kind = OpKind::Constant;
    n.shape = value.shape;
    n.constant = std::move(value);
    return push(std::move(n));
  }

  NodeId affine(NodeId weight, NodeId x, NodeId bias) {
    const Shape& w = shape_of(weight);
    const Shape& xs = shape_of(x);
    const Shape& bs = shape_of(bias);
    if (w.size() != 2 || xs.size() != 1 || bs.size() != 1 || w[1] != xs[0] || w[0] != bs[0])
      throw ShapeError("affine shape mismatch: W" + shape_str(w) + " x" + shape_str(xs) + " b" + shape_str(bs));
    Node n;
    n.kind = OpKind::Affine;
    n.shape = {w[0]};
    n.inputs = {weight, x, bias};
    return push(std::move(n));
  }

  NodeId relu(NodeId x) { return unary(OpKind::Relu, x); }

  // hinge [.]+ with subgradient 0 at the kink; same primitive as relu
  NodeId hinge(NodeId x) { return unary(OpKind::Relu, x); }

  NodeId softmax(NodeId x) {
    if (shape_of(x).size() != 1) throw ShapeError("softmax expects a vector");
    return unary(OpKind::Softmax, x);
  }

  NodeId log_clamped(NodeId x) { return unary(OpKind::LogClamped, x); }

  NodeId sum(NodeId x) { return reduce(OpKind::Sum, x); }
  NodeId mean(NodeId x) { return reduce(OpKind::Mean, x); }

  NodeId add(NodeId a, NodeId b) { return binary(OpKind::Add, a, b); }
  NodeId sub(NodeId a, NodeId b) { return binary(OpKind::Sub, a, b); }
  NodeId mul(NodeId a, NodeId b) { return binary(OpKind::Mul, a, b); }

  NodeId scale(NodeId x, double c) {
    Node n;
    n.kind = OpKind::Scale;
    n.shape = shape_of(x);
    n.inputs = {x};
    n.attr = c;
    return push(std::move(n));
  }

  NodeId squared_distance(NodeId a, NodeId b) {
    if (shape_of(a) != shape_of(b))
      throw ShapeError("squared_distance shape mismatch " + shape_str(shape_of(a)) + " vs " + shape_str(shape_of(b)));
    Node n;
    n.kind = OpKind::SqDist;
    n.shape = {};
    n.inputs = {a, b};
    return push(std::move(n));
  }

  NodeId concat(NodeId a, NodeId b) {
    const Shape& sa = shape_of(a);
    const Shape& sb = shape_of(b);
    if (sa.size() != 1 || sb.size() != 1) throw ShapeError("concat expects vectors");
    Node n;
    n.kind = OpKind::Concat;
    n.shape = {sa[0] + sb[0]};
    n.inputs = {a, b};
    return push(std::move(n));
  }

  std::size_t size() const { return nodes_.size(); }

  const Node& node(NodeId id) const {
    check_id(id);
    return nodes_[id];
  }

  const Shape& shape_of(NodeId id) const { return node(id).shape; }

  bool is_scalar(NodeId id) const { return shape_of(id).empty(); }

  // Names of all Param leaves in construction order.
  std::vector<std::string> param_names() const {
    std::vector<std::string> out;
    for (const Node& n : nodes_)
      if (n.kind == OpKind::Param) out.push_back(n.name);
    return out;
  }

  bool has_param(const std::string& name) const {
    for (const Node& n : nodes_)
      if (n.kind == OpKind::Param && n.name == name) return true;
    return false;
  }

 private:
  NodeId unary(OpKind k, NodeId x) {
    Node n;
    n.kind = k;
    n.shape = shape_of(x);
    n.inputs = {x};
    return push(std::move(n));
  }

  NodeId reduce(OpKind k, NodeId x) {
    check_id(x);
    Node n;
    n.kind = k;
    n.shape = {};
    n.inputs = {x};
    return push(std::move(n));
  }

  NodeId binary(OpKind k, NodeId a, NodeId b) {
    if (shape_of(a) != shape_of(b))
      throw ShapeError("elementwise shape mismatch " + shape_str(shape_of(a)) + " vs " + shape_str(shape_of(b)));
    Node n;
    n.kind = k;
    n.shape = shape_of(a);
    n.inputs = {a, b};
    return push(std::move(n));
  }

  NodeId push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void check_id(NodeId id) const {
    if (id >= nodes_.size()) throw ConfigError("node id " + std::to_string(id) + " not in graph");
  }

  void require_fresh_leaf_name(const std::string& name) const {
    for (const Node& n : nodes_)
      if ((n.kind == OpKind::Param || n.kind == OpKind::Input) && n.name == name)
        throw ConfigError("duplicate leaf name: " + name);
  }

  std::vector<Node> nodes_;
};

using Bindings = std::map<std::string, Tensor>;
using GradientMap = std::map<std::string, Tensor>;

// Values of every node after one forward pass.
struct Evaluation {
  std::vector<Tensor> values;
  const Tensor& value(NodeId id) const { return values[id]; }
  double scalar(NodeId id) const { return values[id].values[0]; }
};

namespace detail {

inline const Tensor& bound_leaf(const Node& n, const Bindings& b) {
  auto it = b.find(n.name);
  if (it == b.end()) throw ConfigError("unbound leaf: " + n.name);
  if (it->second.shape != n.shape)
    throw ShapeError("leaf '" + n.name + "' bound with shape " + shape_str(it->second.shape) +
                     ", declared " + shape_str(n.shape));
  return it->second;
}

inline void check_finite(const Tensor& t, const Node& n, NodeId id) {
  if (!t.all_finite())
    throw NumericError("non-finite result at node " + std::to_string(id) +
                       (n.name.empty() ? std::string() : " (" + n.name + ")"));
}

}  // namespace detail

inline Evaluation evaluate(const Graph& g, const Bindings& bindings) {
  Evaluation ev;
  ev.values.resize(g.size());
  for (NodeId id = 0; id < g.size(); ++id) {
    const Node& n = g.node(id);
    Tensor& out = ev.values[id];
    switch (n.kind) {
      case OpKind::Param:
      case OpKind::Input:
        out = detail::bound_leaf(n, bindings);
        break;
      case OpKind::Constant:
        out = n.constant;
        break;
      case OpKind::Affine: {
        const Tensor& w = ev.values[n.inputs[0]];
        const Tensor& x = ev.values[n.inputs[1]];
        const Tensor& b = ev.values[n.inputs[2]];
        const std::size_t m = w.shape[0], k = w.shape[1];
        out = Tensor::zeros({m});
        for (std::size_t i = 0; i < m; ++i) {
          double acc = b[i];
          const double* wr = w.values.data() + i * k;
          for (std::size_t j = 0; j < k; ++j) acc += wr[j] * x[j];
          out[i] = acc;
        }
        break;
      }
      case OpKind::Relu: {
        const Tensor& x = ev.values[n.inputs[0]];
        out = x;
        for (double& v : out.values) v = v > 0.0 ? v : 0.0;
        break;
      }
      case OpKind::Softmax: {
        const Tensor& x = ev.values[n.inputs[0]];
        out = x;
        double mx = out[0];
        for (double v : out.values) mx = std::max(mx, v);
        double z = 0.0;
        for (double& v : out.values) {
          v = std::exp(v - mx);
          z += v;
        }
        for (double& v : out.values) v /= z;
        break;
      }
      case OpKind::LogClamped: {
        const Tensor& x = ev.values[n.inputs[0]];
        out = x;
        for (double& v : out.values) v = std::log(std::min(std::max(v, kProbClampLo), kProbClampHi));
        break;
      }
      case OpKind::Sum: {
        const Tensor& x = ev.values[n.inputs[0]];
        double acc = 0.0;
        for (double v : x.values) acc += v;
        out = Tensor::scalar(acc);
        break;
      }
      case OpKind::Mean: {
        const Tensor& x = ev.values[n.inputs[0]];
        double acc = 0.0;
        for (double v : x.values) acc += v;
        out = Tensor::scalar(x.numel() ? acc / static_cast<double>(x.numel()) : 0.0);
        break;
      }
      case OpKind::Add:
      case OpKind::Sub:
      case OpKind::Mul: {
        const Tensor& a = ev.values[n.inputs[0]];
        const Tensor& b = ev.values[n.inputs[1]];
        out = a;
        if (n.kind == OpKind::Add)
          for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b[i];
        else if (n.kind == OpKind::Sub)
          for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= b[i];
        else
          for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= b[i];
        break;
      }
      case OpKind::Scale: {
        out = ev.values[n.inputs[0]];
        for (double& v : out.values) v *= n.attr;
        break;
      }
      case OpKind::SqDist: {
        const Tensor& a = ev.values[n.inputs[0]];
        const Tensor& b = ev.values[n.inputs[1]];
        double acc = 0.0;
        for (std::size_t i = 0; i < a.numel(); ++i) {
          const double d = a[i] - b[i];
          acc += d * d;
        }
        out = Tensor::scalar(acc);
        break;
      }
      case OpKind::Concat: {
        const Tensor& a = ev.values[n.inputs[0]];
        const Tensor& b = ev.values[n.inputs[1]];
        out = Tensor::zeros(n.shape);
        std::copy(a.values.begin(), a.values.end(), out.values.begin());
        std::copy(b.values.begin(), b.values.end(), out.values.begin() + a.numel());
        break;
      }
    }
    detail::check_finite(out, n, id);
  }
  return ev;
}

// Reverse-mode gradients of a scalar loss node with respect to the named
// parameter leaves. Leaves outside `wrt` receive no entry; requested leaves
// that do not influence the loss receive zeros. Contributions through shared
// subexpressions accumulate by summation.
inline GradientMap gradients(const Graph& g, NodeId loss, const Evaluation& ev,
                             const std::set<std::string>& wrt) {
  if (!g.is_scalar(loss)) throw ConfigError("loss node must be scalar");
  for (const std::string& name : wrt)
    if (!g.has_param(name)) throw ConfigError("wrt leaf not in graph: " + name);

  GradientMap out;
  if (wrt.empty()) return out;

  // adjoints, allocated lazily; a node with no tensor never influenced the loss
  std::vector<Tensor> adj(g.size());
  std::vector<bool> touched(g.size(), false);
  adj[loss] = Tensor::scalar(1.0);
  touched[loss] = true;

  auto accum = [&](NodeId id, std::size_t i, double v) {
    if (!touched[id]) {
      adj[id] = Tensor::zeros(g.shape_of(id));
      touched[id] = true;
    }
    adj[id].values[i] += v;
  };

  for (NodeId id = loss + 1; id-- > 0;) {
    if (!touched[id]) continue;
    const Node& n = g.node(id);
    const Tensor& gy = adj[id];
    switch (n.kind) {
      case OpKind::Param:
      case OpKind::Input:
      case OpKind::Constant:
        break;
      case OpKind::Affine: {
        const Tensor& w = ev.values[n.inputs[0]];
        const Tensor& x = ev.values[n.inputs[1]];
        const std::size_t m = w.shape[0], k = w.shape[1];
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = gy[i];
          if (gi == 0.0) continue;
          for (std::size_t j = 0; j < k; ++j) {
            accum(n.inputs[0], i * k + j, gi * x[j]);          // dW
            accum(n.inputs[1], j, gi * w.values[i * k + j]);   // dx
          }
          accum(n.inputs[2], i, gi);                           // db
        }
        break;
      }
      case OpKind::Relu: {
        const Tensor& x = ev.values[n.inputs[0]];
        for (std::size_t i = 0; i < x.numel(); ++i)
          if (x[i] > 0.0) accum(n.inputs[0], i, gy[i]);
        break;
      }
      case OpKind::Softmax: {
        const Tensor& y = ev.values[id];
        double dot = 0.0;
        for (std::size_t i = 0; i < y.numel(); ++i) dot += gy[i] * y[i];
        for (std::size_t i = 0; i < y.numel(); ++i) accum(n.inputs[0], i, y[i] * (gy[i] - dot));
        break;
      }
      case OpKind::LogClamped: {
        const Tensor& x = ev.values[n.inputs[0]];
        for (std::size_t i = 0; i < x.numel(); ++i)
          if (x[i] > kProbClampLo && x[i] < kProbClampHi) accum(n.inputs[0], i, gy[i] / x[i]);
        break;
      }
      case OpKind::Sum: {
        const double g0 = gy[0];
        for (std::size_t i = 0; i < shape_numel(g.shape_of(n.inputs[0])); ++i) accum(n.inputs[0], i, g0);
        break;
      }
      case OpKind::Mean: {
        const std::size_t cnt = shape_numel(g.shape_of(n.inputs[0]));
        const double g0 = cnt ? gy[0] / static_cast<double>(cnt) : 0.0;
        for (std::size_t i = 0; i < cnt; ++i) accum(n.inputs[0], i, g0);
        break;
      }
      case OpKind::Add:
        for (std::size_t i = 0; i < gy.numel(); ++i) {
          accum(n.inputs[0], i, gy[i]);
          accum(n.inputs[1], i, gy[i]);
        }
        break;
      case OpKind::Sub:
        for (std::size_t i = 0; i < gy.numel(); ++i) {
          accum(n.inputs[0], i, gy[i]);
          accum(n.inputs[1], i, -gy[i]);
        }
        break;
      case OpKind::Mul: {
        const Tensor& a = ev.values[n.inputs[0]];
        const Tensor& b = ev.values[n.inputs[1]];
        for (std::size_t i = 0; i < gy.numel(); ++i) {
          accum(n.inputs[0], i, gy[i] * b[i]);
          accum(n.inputs[1], i, gy[i] * a[i]);
        }
        break;
      }
      case OpKind::Scale:
        for (std::size_t i = 0; i < gy.numel(); ++i) accum(n.inputs[0], i, gy[i] * n.attr);
        break;
      case OpKind::SqDist: {
        const Tensor& a = ev.values[n.inputs[0]];
        const Tensor& b = ev.values[n.inputs[1]];
        const double g0 = gy[0];
        for (std::size_t i = 0; i < a.numel(); ++i) {
          const double d = 2.0 * (a[i] - b[i]) * g0;
          accum(n.inputs[0], i, d);
          accum(n.inputs[1], i, -d);
        }
        break;
      }
      case OpKind::Concat: {
        const std::size_t na = shape_numel(g.shape_of(n.inputs[0]));
        for (std::size_t i = 0; i < gy.numel(); ++i) {
          if (i < na)
            accum(n.inputs[0], i, gy[i]);
          else
            accum(n.inputs[1], i - na, gy[i]);
        }
        break;
      }
    }
  }

  for (NodeId id = 0; id < g.size(); ++id) {
    const Node& n = g.node(id);
    if (n.kind != OpKind::Param || !wrt.count(n.name)) continue;
    if (touched[id])
      out[n.name] = adj[id];
    else
      out[n.name] = Tensor::zeros(n.shape);
  }
  return out;
}

inline GradientMap gradients(const Graph& g, NodeId loss, const Bindings& bindings,
                             const std::set<std::string>& wrt) {
  return gradients(g, loss, evaluate(g, bindings), wrt);
}

// Central-difference oracle: perturbs every entry of every `wrt` parameter by
// +-h and compares against the reverse-mode gradient. Returns the maximum
// relative error over all entries, with denominator max(|analytic|, |numeric|, 1e-8).
inline double finite_difference_check(const Graph& g, NodeId loss, const Bindings& bindings,
                                      double h, const std::set<std::string>& wrt) {
  if (!(h > 0.0)) throw ConfigError("finite difference step h must be > 0");
  if (!g.is_scalar(loss)) throw ConfigError("loss node must be scalar");
  const GradientMap analytic = gradients(g, loss, bindings, wrt);

  Bindings work = bindings;
  double max_rel = 0.0;
  for (const auto& [name, grad] : analytic) {
    Tensor& t = work.at(name);
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double orig = t[i];
      t[i] = orig + h;
      const double lp = evaluate(g, work).scalar(loss);
      t[i] = orig - h;
      const double lm = evaluate(g, work).scalar(loss);
      t[i] = orig;
      const double numeric = (lp - lm) / (2.0 * h);
      const double ana = grad[i];
      const double denom = std::max({std::fabs(ana), std::fabs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::fabs(ana - numeric) / denom);
    }
  }
  return max_rel;
}

inline double finite_difference_check(const Graph& g, NodeId loss, const Bindings& bindings, double h) {
  std::set<std::string> all;
  for (const std::string& name : g.param_names()) all.insert(name);
  return finite_difference_check(g, loss, bindings, h, all);
}

}  // namespace ogdl
