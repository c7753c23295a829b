#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ogdl/graph.hpp"
#include "ogdl/rng.hpp"
#include "ogdl/tensor.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Hierarchical disentangling network: a shared encoder E branches into two
// task modules B_u / B_loc producing the features z_u / z_loc; on top of each
// feature sit a classification head (C_u on z_u, C_loc on z_loc) and a
// cross-wired disentanglement head (D_loc on z_u, D_u on z_loc).
// ---------------------------------------------------------------------------

struct NetworkConfig {
  std::size_t input_dim = 32;
  std::vector<std::size_t> encoder_widths = {64};  // affine+relu per entry
  std::vector<std::size_t> branch_widths = {32};   // affine+relu per entry, then linear to z_dim
  std::size_t z_dim = 16;
  std::size_t k_u = 2;    // UC classes (normal / UC)
  std::size_t k_loc = 3;  // location classes (right colon / left colon / rectum)

  void validate() const {
    if (input_dim == 0 || z_dim == 0 || k_u < 2 || k_loc < 2)
      throw ConfigError("network config: zero-width layer or head");
    for (std::size_t w : encoder_widths)
      if (w == 0) throw ConfigError("network config: zero-width encoder layer");
    for (std::size_t w : branch_widths)
      if (w == 0) throw ConfigError("network config: zero-width branch layer");
  }

  std::size_t encoder_out() const { return encoder_widths.empty() ? input_dim : encoder_widths.back(); }
};

enum class Group : std::size_t { E = 0, B_u, B_loc, C_u, C_loc, D_u, D_loc };
constexpr std::size_t kGroupCount = 7;

inline const std::array<std::string, kGroupCount>& group_names() {
  static const std::array<std::string, kGroupCount> names = {"E",   "B_u", "B_loc", "C_u",
                                                             "C_loc", "D_u", "D_loc"};
  return names;
}

inline Group group_from_name(const std::string& name) {
  const auto& names = group_names();
  for (std::size_t i = 0; i < kGroupCount; ++i)
    if (names[i] == name) return static_cast<Group>(i);
  throw ConfigError("unknown parameter group: " + name);
}

// All trainable parameters, partitioned into the seven sub-module groups.
// Within a group tensors are ordered layer0.W, layer0.b, layer1.W, ...
struct ParamSet {
  std::array<std::vector<Tensor>, kGroupCount> groups;

  std::vector<Tensor>& group(Group g) { return groups[static_cast<std::size_t>(g)]; }
  const std::vector<Tensor>& group(Group g) const { return groups[static_cast<std::size_t>(g)]; }

  bool group_same_bits(const ParamSet& o, Group g) const {
    const auto& a = group(g);
    const auto& b = o.group(g);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!a[i].same_bits(b[i])) return false;
    return true;
  }

  bool same_bits(const ParamSet& o) const {
    for (std::size_t i = 0; i < kGroupCount; ++i)
      if (!group_same_bits(o, static_cast<Group>(i))) return false;
    return true;
  }
};

// Leaf name for tensor `idx` of `group`: "<group>.<layer>.<W|b>"
inline std::string param_leaf_name(Group g, std::size_t idx) {
  return group_names()[static_cast<std::size_t>(g)] + "." + std::to_string(idx / 2) +
         (idx % 2 == 0 ? ".W" : ".b");
}

namespace detail {

struct LayerDims {
  std::size_t in, out;
  bool relu_after;
};

// Layer dimensions per group, derived from the config.
inline std::vector<LayerDims> group_layers(const NetworkConfig& cfg, Group g) {
  std::vector<LayerDims> layers;
  switch (g) {
    case Group::E: {
      std::size_t cur = cfg.input_dim;
      for (std::size_t w : cfg.encoder_widths) {
        layers.push_back({cur, w, true});
        cur = w;
      }
      break;
    }
    case Group::B_u:
    case Group::B_loc: {
      std::size_t cur = cfg.encoder_out();
      for (std::size_t w : cfg.branch_widths) {
        layers.push_back({cur, w, true});
        cur = w;
      }
      layers.push_back({cur, cfg.z_dim, false});  // z stays linear
      break;
    }
    case Group::C_u:
    case Group::D_u:
      layers.push_back({cfg.z_dim, cfg.k_u, false});
      break;
    case Group::C_loc:
    case Group::D_loc:
      layers.push_back({cfg.z_dim, cfg.k_loc, false});
      break;
  }
  return layers;
}

}  // namespace detail

// Deterministic initialisation: weights uniform in +-1/sqrt(fan_in), biases zero.
inline ParamSet init(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamSet params;
  for (std::size_t gi = 0; gi < kGroupCount; ++gi) {
    Rng rng(split_seed(seed, gi));
    for (const auto& layer : detail::group_layers(cfg, static_cast<Group>(gi))) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
      Tensor w = Tensor::zeros({layer.out, layer.in});
      for (double& v : w.values) v = rng.uniform(-bound, bound);
      params.groups[gi].push_back(std::move(w));
      params.groups[gi].push_back(Tensor::zeros({layer.out}));
    }
  }
  return params;
}

// Union of the leaf names of the requested groups; used as a wrt-set to
// realize selective back-propagation (freezing everything else).
inline std::set<std::string> group_params(const ParamSet& params, const std::set<std::string>& groups) {
  std::set<std::string> out;
  for (const std::string& gname : groups) {
    const Group g = group_from_name(gname);
    const auto& tensors = params.group(g);
    for (std::size_t i = 0; i < tensors.size(); ++i) out.insert(param_leaf_name(g, i));
  }
  return out;
}

inline Bindings bindings_from(const ParamSet& params) {
  Bindings b;
  for (std::size_t gi = 0; gi < kGroupCount; ++gi) {
    const auto& tensors = params.groups[gi];
    for (std::size_t i = 0; i < tensors.size(); ++i)
      b.emplace(param_leaf_name(static_cast<Group>(gi), i), tensors[i]);
  }
  return b;
}

// Per-record taps of the forward pass.
struct NetTaps {
  NodeId z_u, z_loc, p_u, p_loc, d_u, d_loc;
};

// Adds the parameter leaves of a network to a graph once, then wires the
// trunk and all four heads for any number of input nodes.
class NetGraphBuilder {
 public:
  NetGraphBuilder(Graph& g, const NetworkConfig& cfg) : g_(g), cfg_(cfg) {
    cfg.validate();
    for (std::size_t gi = 0; gi < kGroupCount; ++gi) {
      const auto layers = detail::group_layers(cfg, static_cast<Group>(gi));
      auto& leaves = leaves_[gi];
      for (std::size_t li = 0; li < layers.size(); ++li) {
        leaves.push_back(g_.param(param_leaf_name(static_cast<Group>(gi), 2 * li), {layers[li].out, layers[li].in}));
        leaves.push_back(g_.param(param_leaf_name(static_cast<Group>(gi), 2 * li + 1), {layers[li].out}));
      }
    }
  }

  // wire(x): z_u = B_u(E(x)), z_loc = B_loc(E(x)), p_u = C_u(z_u),
  // p_loc = C_loc(z_loc), and the cross-wired d_loc = D_loc(z_u),
  // d_u = D_u(z_loc).
  NetTaps wire(NodeId x) {
    if (g_.shape_of(x) != Shape{cfg_.input_dim}) throw ShapeError("network input must have input_dim entries");
    const NodeId enc = run_group(Group::E, x);
    NetTaps t;
    t.z_u = run_group(Group::B_u, enc);
    t.z_loc = run_group(Group::B_loc, enc);
    t.p_u = g_.softmax(run_group(Group::C_u, t.z_u));
    t.p_loc = g_.softmax(run_group(Group::C_loc, t.z_loc));
    t.d_loc = g_.softmax(run_group(Group::D_loc, t.z_u));
    t.d_u = g_.softmax(run_group(Group::D_u, t.z_loc));
    return t;
  }

  Graph& graph() { return g_; }
  const NetworkConfig& config() const { return cfg_; }

 private:
  NodeId run_group(Group g, NodeId x) {
    const auto layers = detail::group_layers(cfg_, g);
    const auto& leaves = leaves_[static_cast<std::size_t>(g)];
    NodeId cur = x;
    for (std::size_t li = 0; li < layers.size(); ++li) {
      cur = g_.affine(leaves[2 * li], cur, leaves[2 * li + 1]);
      if (layers[li].relu_after) cur = g_.relu(cur);
    }
    return cur;
  }

  Graph& g_;
  NetworkConfig cfg_;
  std::array<std::vector<NodeId>, kGroupCount> leaves_;
};

struct ForwardOutputs {
  Tensor z_u, z_loc, p_u, p_loc, d_u, d_loc;
};

inline ForwardOutputs forward(const ParamSet& params, const NetworkConfig& cfg, const Tensor& x) {
  if (x.shape != Shape{cfg.input_dim}) throw ShapeError("forward: input must have input_dim entries");
  Graph g;
  NetGraphBuilder net(g, cfg);
  const NetTaps taps = net.wire(g.constant(x));
  const Evaluation ev = evaluate(g, bindings_from(params));
  return {ev.value(taps.z_u), ev.value(taps.z_loc), ev.value(taps.p_u),
          ev.value(taps.p_loc), ev.value(taps.d_u), ev.value(taps.d_loc)};
}

// ---------------------------------------------------------------------------
// Checkpoints: versioned text records of the named parameter tensors.
// Format: "ogdl-checkpoint 1\n<count>\n" then per tensor one line
// "<name> <rank> <dims...> <values...>" printed with max_digits10 precision.
// ---------------------------------------------------------------------------

inline void save_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path);
  std::size_t count = 0;
  for (const auto& g : params.groups) count += g.size();
  out << "ogdl-checkpoint 1\n" << count << "\n";
  char buf[64];
  for (std::size_t gi = 0; gi < kGroupCount; ++gi) {
    const auto& tensors = params.groups[gi];
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const Tensor& t = tensors[i];
      out << param_leaf_name(static_cast<Group>(gi), i) << " " << t.rank();
      for (std::size_t d : t.shape) out << " " << d;
      for (double v : t.values) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw DataError("write failure on checkpoint: " + path);
}

inline ParamSet load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (!in || magic != "ogdl-checkpoint") throw DataError("not a checkpoint file: " + path);
  if (version != 1) throw DataError("unsupported checkpoint version " + std::to_string(version));
  std::size_t count = 0;
  in >> count;
  if (!in) throw DataError("corrupt checkpoint header: " + path);

  ParamSet params;
  std::array<std::size_t, kGroupCount> next_idx{};
  for (std::size_t k = 0; k < count; ++k) {
    std::string name;
    std::size_t rank = 0;
    in >> name >> rank;
    if (!in) throw DataError("truncated checkpoint: " + path);
    Shape shape(rank);
    for (std::size_t d = 0; d < rank; ++d) in >> shape[d];
    Tensor t = Tensor::zeros(shape);
    for (double& v : t.values) in >> v;
    if (!in) throw DataError("truncated checkpoint: " + path);

    const auto dot = name.find('.');
    if (dot == std::string::npos) throw DataError("malformed tensor name in checkpoint: " + name);
    const Group g = group_from_name(name.substr(0, dot));
    const std::size_t gi = static_cast<std::size_t>(g);
    if (name != param_leaf_name(g, next_idx[gi]))
      throw DataError("unexpected tensor order in checkpoint at: " + name);
    params.groups[gi].push_back(std::move(t));
    ++next_idx[gi];
  }
  for (std::size_t gi = 0; gi < kGroupCount; ++gi)
    if (params.groups[gi].empty() || params.groups[gi].size() % 2 != 0)
      throw DataError("checkpoint missing tensors for group " + group_names()[gi]);
  return params;
}

// Reconstructs the architecture from parameter shapes, so a checkpoint alone
// is enough to evaluate a network.
inline NetworkConfig config_from_params(const ParamSet& params) {
  NetworkConfig cfg;
  const auto& e = params.group(Group::E);
  const auto& bu = params.group(Group::B_u);
  cfg.input_dim = e.empty() ? bu.front().shape[1] : e.front().shape[1];
  cfg.encoder_widths.clear();
  for (std::size_t i = 0; i < e.size(); i += 2) cfg.encoder_widths.push_back(e[i].shape[0]);
  cfg.branch_widths.clear();
  for (std::size_t i = 0; i + 2 < bu.size(); i += 2) cfg.branch_widths.push_back(bu[i].shape[0]);
  cfg.z_dim = bu[bu.size() - 2].shape[0];
  cfg.k_u = params.group(Group::C_u).front().shape[0];
  cfg.k_loc = params.group(Group::C_loc).front().shape[0];
  cfg.validate();
  return cfg;
}

}  // namespace ogdl
