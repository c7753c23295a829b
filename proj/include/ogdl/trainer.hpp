#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ogdl/losses.hpp"
#include "ogdl/network.hpp"
#include "ogdl/rng.hpp"
#include "ogdl/seqgen.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Training loops: the proposed two-step routed update plus the comparison
// methods (supervised-only, pseudo-labeling, a noise-based FixMatch analog)
// and the ablation variants obtained by zeroing loss weights.
// ---------------------------------------------------------------------------

enum class Method {
  Supervised,
  PseudoLabel,
  FixmatchLite,
  Proposed,
  ProposedNoOrder,
  LocationMultitask,
};

inline Method method_from_string(const std::string& s) {
  if (s == "supervised") return Method::Supervised;
  if (s == "pseudo_label") return Method::PseudoLabel;
  if (s == "fixmatch_lite") return Method::FixmatchLite;
  if (s == "proposed") return Method::Proposed;
  if (s == "proposed_no_order") return Method::ProposedNoOrder;
  if (s == "location_multitask") return Method::LocationMultitask;
  throw ConfigError("unknown method: " + s);
}

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Supervised: return "supervised";
    case Method::PseudoLabel: return "pseudo_label";
    case Method::FixmatchLite: return "fixmatch_lite";
    case Method::Proposed: return "proposed";
    case Method::ProposedNoOrder: return "proposed_no_order";
    default: return "location_multitask";
  }
}

struct TrainConfig {
  Method method = Method::Proposed;
  std::size_t epochs = 100;
  std::size_t batch_fragments = 16;  // batch size, in sequence fragments
  std::size_t fragment_length = 8;
  double learning_rate = 0.05;
  double momentum = 0.0;  // 0.9 enables the optional momentum term
  LossWeights weights;
  AdvForm adv_form = AdvForm::UniformTarget;
  // pseudo-label schedule
  double pl_threshold = 0.95;
  std::size_t pl_warmup_epochs = 10;
  double pl_ramp_fraction = 0.3;  // ramp 0 -> 1 over this fraction of epochs after warm-up
  // fixmatch-lite
  double fm_threshold = 0.95;
  double fm_weak_noise = 0.05;
  double fm_strong_noise = 0.3;
  double fm_dropout = 0.1;
  std::uint64_t seed = 1;

  void validate() const {
    if (batch_fragments == 0 || fragment_length == 0) throw ConfigError("train: batch/fragment size must be > 0");
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("train: momentum must be in [0,1)");
    if (!(pl_threshold > 0.0) || pl_threshold > 1.0) throw ConfigError("train: pl_threshold must be in (0,1]");
    if (!(fm_threshold > 0.0) || fm_threshold > 1.0) throw ConfigError("train: fm_threshold must be in (0,1]");
    if (pl_ramp_fraction < 0.0 || pl_ramp_fraction > 1.0) throw ConfigError("train: pl_ramp_fraction in [0,1]");
    if (fm_weak_noise < 0.0 || fm_strong_noise < 0.0 || fm_dropout < 0.0 || fm_dropout > 1.0)
      throw ConfigError("train: augmentation strengths out of range");
    weights.validate();
  }
};

// Ablation variants reuse the proposed update rule with zeroed weights.
inline LossWeights effective_weights(const TrainConfig& cfg) {
  LossWeights w = cfg.weights;
  if (cfg.method == Method::ProposedNoOrder) w.lambda_seq = 0.0;
  if (cfg.method == Method::LocationMultitask) {
    w.lambda_adv = 0.0;
    w.lambda_seq = 0.0;
  }
  return w;
}

struct EpochStats {
  LossBundle losses;
  double val_accuracy = 0.0;
  std::size_t pseudo_labeled = 0;  // pseudo-label assignments / fixmatch passes
};

struct TrainResult {
  ParamSet best_params;   // validation-selected snapshot
  ParamSet final_params;  // parameters after the last epoch
  std::vector<EpochStats> history;
  std::size_t selected_epoch = 0;      // first epoch attaining the max validation accuracy
  double best_val_accuracy = -1.0;
};

// Observer invoked after each routed update step; `step` is 1 for the D-head
// step and 2 for the main step. Used by the routing audits.
struct RoutedStep {
  int step = 0;
  const ParamSet& before;
  const ParamSet& after;
};
using StepObserver = std::function<void(const RoutedStep&)>;

// ---------------------------------------------------------------------------
// Dataset views and fragment batching.
// ---------------------------------------------------------------------------

struct DatasetView {
  const Dataset* data = nullptr;
  std::vector<std::vector<std::size_t>> train_sequences;  // record indices, ordered by t
  std::vector<std::size_t> train_records, val_records, test_records;

  explicit DatasetView(const Dataset& d) : data(&d) {
    std::map<std::uint32_t, std::vector<std::size_t>> by_seq;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      const SequenceRecord& r = d.records[i];
      if (r.sequence_id >= d.manifest.splits.size()) throw DataError("record with unknown sequence id");
      switch (d.manifest.splits[r.sequence_id]) {
        case Split::Train:
          by_seq[r.sequence_id].push_back(i);
          train_records.push_back(i);
          break;
        case Split::Val:
          val_records.push_back(i);
          break;
        case Split::Test:
          test_records.push_back(i);
          break;
      }
    }
    for (auto& [id, idxs] : by_seq) {
      std::sort(idxs.begin(), idxs.end(),
                [&](std::size_t a, std::size_t b) { return d.records[a].t < d.records[b].t; });
      train_sequences.push_back(std::move(idxs));
    }
  }

  bool is_labeled(std::size_t record_idx) const {
    const SequenceRecord& r = data->records[record_idx];
    return data->manifest.is_labeled(r.sequence_id, r.t);
  }

  std::size_t labeled_train_count() const {
    std::size_t n = 0;
    for (std::size_t i : train_records)
      if (is_labeled(i)) ++n;
    return n;
  }
};

// One contiguous fragment, as indices into the dataset's record array.
struct FragmentIdx {
  std::vector<std::size_t> records;
};

// Fixed partition of every train sequence into contiguous chunks; epochs
// reshuffle fragment order only, so each epoch covers every record once.
inline std::vector<FragmentIdx> fragment_partition(const DatasetView& view, std::size_t fragment_length) {
  if (fragment_length == 0) throw ConfigError("fragment length must be > 0");
  std::vector<FragmentIdx> out;
  for (const auto& seq : view.train_sequences)
    for (std::size_t start = 0; start < seq.size(); start += fragment_length) {
      FragmentIdx f;
      for (std::size_t k = start; k < std::min(seq.size(), start + fragment_length); ++k)
        f.records.push_back(seq[k]);
      out.push_back(std::move(f));
    }
  return out;
}

// Shuffled batches of fragments for one epoch.
inline std::vector<std::vector<FragmentIdx>> make_fragments(const DatasetView& view,
                                                            std::size_t fragment_length,
                                                            std::size_t batch_fragments,
                                                            std::uint64_t seed) {
  std::vector<FragmentIdx> frags = fragment_partition(view, fragment_length);
  Rng rng(seed);
  rng.shuffle(frags);
  std::vector<std::vector<FragmentIdx>> batches;
  for (std::size_t i = 0; i < frags.size(); i += batch_fragments) {
    std::vector<FragmentIdx> batch;
    for (std::size_t k = i; k < std::min(frags.size(), i + batch_fragments); ++k)
      batch.push_back(std::move(frags[k]));
    batches.push_back(std::move(batch));
  }
  return batches;
}

// ---------------------------------------------------------------------------
// Forward evaluation of a fixed record list; the graph is built once and
// re-evaluated against successive parameter snapshots.
// ---------------------------------------------------------------------------

class SplitEvaluator {
 public:
  SplitEvaluator(const NetworkConfig& cfg, const Dataset& data, std::vector<std::size_t> record_indices)
      : data_(&data), indices_(std::move(record_indices)) {
    NetGraphBuilder net(g_, cfg);
    for (std::size_t idx : indices_) taps_.push_back(net.wire(g_.constant(data.records[idx].features)));
  }

  struct Outputs {
    std::vector<int> uc_pred;
    std::vector<double> uc_conf;  // max probability, clamped below 1
    std::vector<Tensor> z_u, z_loc;
  };

  Outputs run(const ParamSet& params, bool want_features = false) const {
    const Evaluation ev = evaluate(g_, bindings_from(params));
    Outputs out;
    out.uc_pred.reserve(taps_.size());
    out.uc_conf.reserve(taps_.size());
    for (const NetTaps& t : taps_) {
      const Tensor& p = ev.value(t.p_u);
      const std::size_t best = argmax(p);
      out.uc_pred.push_back(static_cast<int>(best));
      out.uc_conf.push_back(std::min(p[best], kProbClampHi));
      if (want_features) {
        out.z_u.push_back(ev.value(t.z_u));
        out.z_loc.push_back(ev.value(t.z_loc));
      }
    }
    return out;
  }

  // accuracy of argmax p_u against the ground-truth UC labels
  double uc_accuracy(const ParamSet& params) const {
    if (indices_.empty()) throw DataError("accuracy over an empty record set");
    const Outputs out = run(params);
    std::size_t correct = 0;
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      const auto& uc = data_->records[indices_[k]].uc;
      if (!uc.has_value()) throw DataError("record without UC ground truth in evaluation set");
      correct += (out.uc_pred[k] == *uc) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(indices_.size());
  }

  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  Graph g_;
  const Dataset* data_;
  std::vector<std::size_t> indices_;
  std::vector<NetTaps> taps_;
};

// ---------------------------------------------------------------------------
// SGD with optional momentum.
// ---------------------------------------------------------------------------

namespace detail {

inline Tensor& param_by_leaf_name(ParamSet& params, const std::string& name) {
  const std::size_t dot1 = name.find('.');
  const std::size_t dot2 = name.find('.', dot1 + 1);
  if (dot1 == std::string::npos || dot2 == std::string::npos)
    throw ConfigError("malformed parameter leaf name: " + name);
  const Group g = group_from_name(name.substr(0, dot1));
  const std::size_t layer = std::stoul(name.substr(dot1 + 1, dot2 - dot1 - 1));
  const std::size_t idx = 2 * layer + (name.substr(dot2 + 1) == "b" ? 1 : 0);
  auto& tensors = params.group(g);
  if (idx >= tensors.size()) throw ConfigError("leaf name out of range: " + name);
  return tensors[idx];
}

inline void sgd_update(ParamSet& params, const GradientMap& grads, double lr, double momentum,
                       std::map<std::string, Tensor>& velocity) {
  for (const auto& [name, grad] : grads) {
    Tensor& t = param_by_leaf_name(params, name);
    if (momentum > 0.0) {
      auto [it, fresh] = velocity.try_emplace(name, Tensor::zeros(grad.shape));
      Tensor& v = it->second;
      for (std::size_t i = 0; i < t.numel(); ++i) {
        v[i] = momentum * v[i] - lr * grad[i];
        t[i] += v[i];
      }
    } else {
      for (std::size_t i = 0; i < t.numel(); ++i) t[i] -= lr * grad[i];
    }
  }
}

// UC label of a train record as visible to the learner, with optional
// pseudo-label override for records outside the labeled set.
inline std::optional<int> visible_uc(const DatasetView& view, std::size_t idx,
                                     const std::map<std::size_t, int>* pseudo) {
  if (view.is_labeled(idx)) {
    const auto& uc = view.data->records[idx].uc;
    if (!uc.has_value()) throw DataError("labeled-set record without stored UC label");
    return uc;
  }
  if (pseudo) {
    auto it = pseudo->find(idx);
    if (it != pseudo->end()) return it->second;
  }
  return std::nullopt;
}

inline Batch assemble_batch(const DatasetView& view, const std::vector<FragmentIdx>& fragments,
                            const std::map<std::size_t, int>* pseudo = nullptr) {
  Batch batch;
  for (const FragmentIdx& f : fragments) {
    Fragment frag;
    for (std::size_t idx : f.records) {
      const SequenceRecord& r = view.data->records[idx];
      frag.records.push_back(BatchRecord{r.features, r.location, visible_uc(view, idx, pseudo)});
    }
    batch.fragments.push_back(std::move(frag));
  }
  return batch;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trainers.
// ---------------------------------------------------------------------------

namespace detail {

struct EpochAccumulator {
  double sums[7] = {0, 0, 0, 0, 0, 0, 0};
  std::size_t counts[7] = {0, 0, 0, 0, 0, 0, 0};

  void add(const LossBundle& b) {
    const double vals[7] = {b.c_u, b.c_loc, b.d_u, b.d_loc, b.adv_u, b.adv_loc, b.seq};
    const std::size_t ns[7] = {b.n_c_u, b.n_c_loc, b.n_d_u, b.n_d_loc, b.n_adv_u, b.n_adv_loc, b.n_seq};
    for (int i = 0; i < 7; ++i) {
      sums[i] += vals[i] * static_cast<double>(ns[i]);
      counts[i] += ns[i];
    }
  }

  LossBundle mean() const {
    LossBundle b;
    auto m = [&](int i) { return counts[i] ? sums[i] / static_cast<double>(counts[i]) : 0.0; };
    b.c_u = m(0);
    b.c_loc = m(1);
    b.d_u = m(2);
    b.d_loc = m(3);
    b.adv_u = m(4);
    b.adv_loc = m(5);
    b.seq = m(6);
    b.n_c_u = counts[0];
    b.n_c_loc = counts[1];
    b.n_d_u = counts[2];
    b.n_d_loc = counts[3];
    b.n_adv_u = counts[4];
    b.n_adv_loc = counts[5];
    b.n_seq = counts[6];
    return b;
  }
};

// model selection: keep the first epoch attaining the maximum
inline void consider_epoch(TrainResult& result, const ParamSet& params, std::size_t epoch, double acc) {
  if (acc > result.best_val_accuracy) {
    result.best_val_accuracy = acc;
    result.best_params = params;
    result.selected_epoch = epoch;
  }
}

// supervised-style loss over individual records: mean CE(p_u, y) over the
// visible labels plus, optionally, a weighted mean over pseudo-labeled views
struct SupervisedBatch {
  Graph graph;
  NodeId loss = 0;
  std::size_t n_labeled = 0;
  std::size_t n_pseudo = 0;
};

}  // namespace detail

// Proposed method and its weight-zeroed ablation variants. Each batch runs
// two routed updates: (1) L_d_u + L_d_loc into {D_u, D_loc} only, then
// (2) L_c_u + L_c_loc + lambda_adv (L_adv_u + L_adv_loc) + lambda_seq L_seq
// into {E, B_u, B_loc, C_u, C_loc} only, with a fresh forward pass between
// the steps.
inline TrainResult train_proposed(const Dataset& data, const NetworkConfig& net_cfg, const TrainConfig& cfg,
                                  const StepObserver& observer = {}) {
  const DatasetView view(data);
  if (view.labeled_train_count() == 0) throw DataError("no UC-labeled training records");
  const LossWeights weights = effective_weights(cfg);

  TrainResult result;
  ParamSet params = init(net_cfg, cfg.seed);
  result.best_params = params;
  result.final_params = params;
  if (cfg.epochs == 0) return result;

  const SplitEvaluator val_eval(net_cfg, data, view.val_records);
  std::map<std::string, Tensor> velocity;
  const std::set<std::string> group_names_d = {"D_u", "D_loc"};
  const std::set<std::string> group_names_main = {"E", "B_u", "B_loc", "C_u", "C_loc"};

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    detail::EpochAccumulator acc;
    const auto batches =
        make_fragments(view, cfg.fragment_length, cfg.batch_fragments, split_seed(cfg.seed, 0xE50000 + epoch));
    for (const auto& batch_frags : batches) {
      const Batch batch = detail::assemble_batch(view, batch_frags);
      Graph g;
      NetGraphBuilder net(g, net_cfg);
      const BatchLossNodes nodes = build_batch_losses(g, net, batch, weights, cfg.adv_form);
      const std::set<std::string> wrt_d = group_params(params, group_names_d);
      const std::set<std::string> wrt_main = group_params(params, group_names_main);

      // step 1: disentanglement heads
      {
        const Evaluation ev = evaluate(g, bindings_from(params));
        const GradientMap grads = gradients(g, nodes.d_step, ev, wrt_d);
        if (observer) {
          const ParamSet before = params;
          detail::sgd_update(params, grads, cfg.learning_rate, cfg.momentum, velocity);
          observer(RoutedStep{1, before, params});
        } else {
          detail::sgd_update(params, grads, cfg.learning_rate, cfg.momentum, velocity);
        }
      }
      // step 2: encoder, branches and classification heads, D heads frozen
      {
        const Evaluation ev = evaluate(g, bindings_from(params));
        const GradientMap grads = gradients(g, nodes.main_step, ev, wrt_main);
        if (observer) {
          const ParamSet before = params;
          detail::sgd_update(params, grads, cfg.learning_rate, cfg.momentum, velocity);
          observer(RoutedStep{2, before, params});
        } else {
          detail::sgd_update(params, grads, cfg.learning_rate, cfg.momentum, velocity);
        }
        acc.add(read_loss_bundle(nodes, ev));
      }
    }

    EpochStats stats;
    stats.losses = acc.mean();
    stats.val_accuracy = val_eval.uc_accuracy(params);
    result.history.push_back(stats);
    detail::consider_epoch(result, params, epoch, stats.val_accuracy);
  }
  result.final_params = params;
  return result;
}

// Supervised baseline, pseudo-labeling and the fixmatch analog share one
// record-level loop; they differ only in how unlabeled records contribute.
inline TrainResult train_supervised_family(const Dataset& data, const NetworkConfig& net_cfg,
                                           const TrainConfig& cfg) {
  const DatasetView view(data);
  if (view.labeled_train_count() == 0) throw DataError("no UC-labeled training records");

  TrainResult result;
  ParamSet params = init(net_cfg, cfg.seed);
  result.best_params = params;
  result.final_params = params;
  if (cfg.epochs == 0) return result;

  const SplitEvaluator val_eval(net_cfg, data, view.val_records);
  std::map<std::string, Tensor> velocity;
  const std::set<std::string> main_groups = {"E", "B_u", "C_u"};

  // unlabeled train records, for the semi-supervised variants
  std::vector<std::size_t> unlabeled;
  for (std::size_t idx : view.train_records)
    if (!view.is_labeled(idx)) unlabeled.push_back(idx);
  std::optional<SplitEvaluator> unlabeled_eval;
  if (cfg.method == Method::PseudoLabel && !unlabeled.empty())
    unlabeled_eval.emplace(net_cfg, data, unlabeled);

  const std::size_t ramp_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.pl_ramp_fraction * static_cast<double>(cfg.epochs)));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // pseudo-label assignment for this epoch
    std::map<std::size_t, int> pseudo;
    double alpha = 0.0;
    if (cfg.method == Method::PseudoLabel && epoch >= cfg.pl_warmup_epochs && unlabeled_eval) {
      const auto out = unlabeled_eval->run(params);
      for (std::size_t k = 0; k < unlabeled.size(); ++k)
        if (out.uc_conf[k] >= cfg.pl_threshold) pseudo.emplace(unlabeled[k], out.uc_pred[k]);
      const std::size_t r = epoch - cfg.pl_warmup_epochs;
      alpha = std::min(1.0, static_cast<double>(r) / static_cast<double>(ramp_len));
      if (alpha == 0.0) pseudo.clear();  // zero-weight epoch contributes nothing
    }

    detail::EpochAccumulator acc;
    std::size_t pseudo_used = 0;
    const auto batches =
        make_fragments(view, cfg.fragment_length, cfg.batch_fragments, split_seed(cfg.seed, 0xE50000 + epoch));
    Rng aug_rng(split_seed(cfg.seed, 0xF40000 + epoch));

    for (const auto& batch_frags : batches) {
      Graph g;
      NetGraphBuilder net(g, net_cfg);
      std::vector<NodeId> labeled_terms, extra_terms;
      std::vector<std::size_t> batch_unlabeled;

      for (const FragmentIdx& f : batch_frags)
        for (std::size_t idx : f.records) {
          if (view.is_labeled(idx)) {
            const auto uc = detail::visible_uc(view, idx, nullptr);
            const NetTaps taps = net.wire(g.constant(view.data->records[idx].features));
            labeled_terms.push_back(cross_entropy_node(g, taps.p_u, static_cast<std::size_t>(*uc)));
          } else if (cfg.method == Method::PseudoLabel) {
            auto it = pseudo.find(idx);
            if (it != pseudo.end()) {
              const NetTaps taps = net.wire(g.constant(view.data->records[idx].features));
              extra_terms.push_back(cross_entropy_node(g, taps.p_u, static_cast<std::size_t>(it->second)));
              ++pseudo_used;
            }
          } else if (cfg.method == Method::FixmatchLite) {
            batch_unlabeled.push_back(idx);
          }
        }

      // fixmatch-lite: confident prediction on the lightly-perturbed view
      // becomes the target for the more-perturbed view
      if (cfg.method == Method::FixmatchLite && !batch_unlabeled.empty()) {
        std::vector<Tensor> weak, strong;
        for (std::size_t idx : batch_unlabeled) {
          const Tensor& x = view.data->records[idx].features;
          Tensor w = x, s = x;
          for (std::size_t d = 0; d < x.numel(); ++d) {
            w[d] += cfg.fm_weak_noise * aug_rng.gaussian();
            s[d] += cfg.fm_strong_noise * aug_rng.gaussian();
            if (aug_rng.uniform() < cfg.fm_dropout) s[d] = 0.0;
          }
          weak.push_back(std::move(w));
          strong.push_back(std::move(s));
        }
        // weak-view predictions under the current parameters
        Graph wg;
        NetGraphBuilder wnet(wg, net_cfg);
        std::vector<NetTaps> wtaps;
        for (const Tensor& w : weak) wtaps.push_back(wnet.wire(wg.constant(w)));
        const Evaluation wev = evaluate(wg, bindings_from(params));
        for (std::size_t k = 0; k < batch_unlabeled.size(); ++k) {
          const Tensor& p = wev.value(wtaps[k].p_u);
          const std::size_t best = argmax(p);
          if (std::min(p[best], kProbClampHi) >= cfg.fm_threshold) {
            const NetTaps taps = net.wire(g.constant(strong[k]));
            extra_terms.push_back(cross_entropy_node(g, taps.p_u, best));
            ++pseudo_used;
          }
        }
      }

      if (labeled_terms.empty() && extra_terms.empty()) continue;

      NodeId loss;
      const NodeId labeled_mean = detail::mean_or_zero(g, labeled_terms);
      if (extra_terms.empty()) {
        loss = labeled_mean;
      } else if (cfg.method == Method::PseudoLabel) {
        loss = g.add(labeled_mean, g.scale(detail::mean_or_zero(g, extra_terms), alpha));
      } else {
        // consistency term averaged over the unlabeled records in the batch
        NodeId sum = extra_terms[0];
        for (std::size_t i = 1; i < extra_terms.size(); ++i) sum = g.add(sum, extra_terms[i]);
        loss = g.add(labeled_mean, g.scale(sum, 1.0 / static_cast<double>(batch_unlabeled.size())));
      }

      const Evaluation ev = evaluate(g, bindings_from(params));
      const GradientMap grads = gradients(g, loss, ev, group_params(params, main_groups));
      detail::sgd_update(params, grads, cfg.learning_rate, cfg.momentum, velocity);

      LossBundle b;
      b.c_u = labeled_terms.empty() ? 0.0 : ev.scalar(labeled_mean);
      b.n_c_u = labeled_terms.size();
      acc.add(b);
    }

    EpochStats stats;
    stats.losses = acc.mean();
    stats.val_accuracy = val_eval.uc_accuracy(params);
    stats.pseudo_labeled = pseudo_used;
    result.history.push_back(stats);
    detail::consider_epoch(result, params, epoch, stats.val_accuracy);
  }
  result.final_params = params;
  return result;
}

inline TrainResult train(const Dataset& data, const NetworkConfig& net_cfg, const TrainConfig& cfg,
                         const StepObserver& observer = {}) {
  cfg.validate();
  switch (cfg.method) {
    case Method::Proposed:
    case Method::ProposedNoOrder:
    case Method::LocationMultitask:
      return train_proposed(data, net_cfg, cfg, observer);
    default:
      return train_supervised_family(data, net_cfg, cfg);
  }
}

}  // namespace ogdl
