#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ogdl/metrics.hpp"
#include "ogdl/probe.hpp"
#include "ogdl/trainer.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Split-level evaluation.
// ---------------------------------------------------------------------------

inline std::vector<std::size_t> split_record_indices(const Dataset& data, Split split) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.records.size(); ++i)
    if (data.manifest.splits[data.records[i].sequence_id] == split) out.push_back(i);
  return out;
}

// record indices of one split grouped by sequence, ordered by t
inline std::vector<std::vector<std::size_t>> split_sequences(const Dataset& data, Split split) {
  std::map<std::uint32_t, std::vector<std::size_t>> by_seq;
  for (std::size_t i = 0; i < data.records.size(); ++i)
    if (data.manifest.splits[data.records[i].sequence_id] == split)
      by_seq[data.records[i].sequence_id].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [id, idxs] : by_seq) {
    std::sort(idxs.begin(), idxs.end(),
              [&](std::size_t a, std::size_t b) { return data.records[a].t < data.records[b].t; });
    out.push_back(std::move(idxs));
  }
  return out;
}

struct SplitEvalResult {
  ConfusionCounts counts;
  MetricsReport report;
};

inline SplitEvalResult evaluate_split(const ParamSet& params, const NetworkConfig& cfg,
                                      const Dataset& data, Split split) {
  const SplitEvaluator ev(cfg, data, split_record_indices(data, split));
  const auto out = ev.run(params);
  std::vector<int> truth;
  truth.reserve(ev.indices().size());
  for (std::size_t idx : ev.indices()) {
    const auto& uc = data.records[idx].uc;
    if (!uc.has_value()) throw DataError("record without UC ground truth in evaluation split");
    truth.push_back(*uc);
  }
  SplitEvalResult res;
  res.counts = confusion(out.uc_pred, truth);
  res.report = metrics(res.counts);
  return res;
}

// z_u features and location labels of a split, for the disentanglement probe
inline std::pair<std::vector<Tensor>, std::vector<int>> probe_inputs_z_u(const ParamSet& params,
                                                                         const NetworkConfig& cfg,
                                                                         const Dataset& data, Split split) {
  const SplitEvaluator ev(cfg, data, split_record_indices(data, split));
  const auto out = ev.run(params, /*want_features=*/true);
  std::vector<int> labels;
  for (std::size_t idx : ev.indices()) labels.push_back(data.records[idx].location);
  return {out.z_u, labels};
}

// mean ||z_u(t) - z_u(t+1)||^2 over consecutive frames of a split's sequences
inline double mean_adjacent_distance(const ParamSet& params, const NetworkConfig& cfg,
                                     const Dataset& data, Split split) {
  const auto seqs = split_sequences(data, split);
  std::vector<std::size_t> flat;
  for (const auto& s : seqs) flat.insert(flat.end(), s.begin(), s.end());
  const SplitEvaluator ev(cfg, data, flat);
  const auto out = ev.run(params, /*want_features=*/true);
  double sum = 0.0;
  std::size_t n = 0, offset = 0;
  for (const auto& s : seqs) {
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      sum += squared_distance(out.z_u[offset + k], out.z_u[offset + k + 1]);
      ++n;
    }
    offset += s.size();
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

// ---------------------------------------------------------------------------
// Comparison and ablation drivers.
// ---------------------------------------------------------------------------

struct MetricStat {
  std::optional<double> mean, stddev;
};

struct TableRow {
  std::string method;
  double labeled_ratio = 0.0;
  MetricStat precision, recall, f1, specificity, accuracy;
  std::vector<MetricsReport> per_seed;
};

struct ResultTable {
  std::vector<TableRow> rows;

  std::string csv() const {
    std::ostringstream os;
    os << "method,R,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
          "specificity_mean,specificity_std,accuracy_mean,accuracy_std\n";
    char buf[32];
    auto cell = [&](const std::optional<double>& v) {
      if (!v.has_value()) return std::string();
      std::snprintf(buf, sizeof buf, "%.2f", *v);
      return std::string(buf);
    };
    for (const TableRow& r : rows) {
      std::snprintf(buf, sizeof buf, "%.2f", r.labeled_ratio);
      os << r.method << "," << buf;
      for (const MetricStat* m : {&r.precision, &r.recall, &r.f1, &r.specificity, &r.accuracy})
        os << "," << cell(m->mean) << "," << cell(m->stddev);
      os << "\n";
    }
    return os.str();
  }
};

namespace detail {

inline MetricStat aggregate(const std::vector<MetricsReport>& reports,
                            std::optional<double> MetricsReport::*field) {
  std::vector<double> vals;
  for (const MetricsReport& r : reports)
    if ((r.*field).has_value()) vals.push_back(*(r.*field));
  MetricStat s;
  if (vals.empty()) return s;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  s.mean = mean;
  s.stddev = std::sqrt(var / static_cast<double>(vals.size()));
  return s;
}

inline TableRow run_cell(const Dataset& data, const NetworkConfig& net_cfg, const TrainConfig& base,
                         Method method, const std::vector<std::uint64_t>& seeds) {
  TableRow row;
  row.method = to_string(method);
  row.labeled_ratio = data.manifest.labeled_ratio;
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = base;
    cfg.method = method;
    cfg.seed = seed;
    const TrainResult result = train(data, net_cfg, cfg);
    row.per_seed.push_back(evaluate_split(result.best_params, net_cfg, data, Split::Test).report);
  }
  row.precision = aggregate(row.per_seed, &MetricsReport::precision);
  row.recall = aggregate(row.per_seed, &MetricsReport::recall);
  row.f1 = aggregate(row.per_seed, &MetricsReport::f1);
  row.specificity = aggregate(row.per_seed, &MetricsReport::specificity);
  row.accuracy = aggregate(row.per_seed, &MetricsReport::accuracy);
  return row;
}

}  // namespace detail

// Five comparison rows: supervised on the fully labeled training set,
// then supervised / pseudo-label / fixmatch-lite / proposed at the dataset's
// labeled ratio. Deterministic given the seeds list.
inline ResultTable run_comparison(const Dataset& data, const NetworkConfig& net_cfg,
                                  const TrainConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("run_comparison: empty seeds list");
  ResultTable table;

  Dataset full = data;
  mask_labels(full, 1.0, split_seed(data.manifest.seed, 0xFA11ULL));
  TableRow full_row = detail::run_cell(full, net_cfg, base, Method::Supervised, seeds);
  full_row.labeled_ratio = 1.0;
  table.rows.push_back(std::move(full_row));

  for (Method m : {Method::Supervised, Method::PseudoLabel, Method::FixmatchLite, Method::Proposed})
    table.rows.push_back(detail::run_cell(data, net_cfg, base, m, seeds));
  return table;
}

// Four ablation rows: baseline, +location, +location+disentangle,
// +location+disentangle+order.
inline ResultTable run_ablation(const Dataset& data, const NetworkConfig& net_cfg,
                                const TrainConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("run_ablation: empty seeds list");
  ResultTable table;
  for (Method m :
       {Method::Supervised, Method::LocationMultitask, Method::ProposedNoOrder, Method::Proposed})
    table.rows.push_back(detail::run_cell(data, net_cfg, base, m, seeds));
  return table;
}

// ---------------------------------------------------------------------------
// Per-sequence prediction strips: ground truth, labels visible during
// training, and the predictions of two checkpoints (with / without the
// ordinal term), one aligned track each.
// ---------------------------------------------------------------------------

struct SequenceStrip {
  std::uint32_t sequence_id = 0;
  std::vector<int> ground_truth;   // 0 normal, 1 UC
  std::vector<int> train_visible;  // -1 hidden, else label
  std::vector<int> pred_with;      // order-guided checkpoint
  std::vector<int> pred_without;   // no-order checkpoint
};

inline std::vector<SequenceStrip> sequence_strips(const ParamSet& with_order,
                                                  const ParamSet& without_order,
                                                  const NetworkConfig& cfg, const Dataset& data,
                                                  Split split) {
  const auto seqs = split_sequences(data, split);
  if (seqs.empty()) throw DataError("no sequences in the requested split");
  std::vector<std::size_t> flat;
  for (const auto& s : seqs) flat.insert(flat.end(), s.begin(), s.end());
  const SplitEvaluator ev(cfg, data, flat);
  const auto out_with = ev.run(with_order);
  const auto out_without = ev.run(without_order);

  std::vector<SequenceStrip> strips;
  std::size_t offset = 0;
  for (const auto& s : seqs) {
    SequenceStrip strip;
    strip.sequence_id = data.records[s.front()].sequence_id;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const SequenceRecord& r = data.records[s[k]];
      if (!r.uc.has_value()) throw DataError("strip sequence with missing UC ground truth");
      strip.ground_truth.push_back(*r.uc);
      strip.train_visible.push_back(data.manifest.is_labeled(r.sequence_id, r.t) ? *r.uc : -1);
      strip.pred_with.push_back(out_with.uc_pred[offset + k]);
      strip.pred_without.push_back(out_without.uc_pred[offset + k]);
    }
    offset += s.size();
    strips.push_back(std::move(strip));
  }
  return strips;
}

inline std::string strips_csv(const std::vector<SequenceStrip>& strips) {
  std::ostringstream os;
  os << "sequence_id,t,ground_truth,train_visible,pred_with_order,pred_without_order\n";
  for (const SequenceStrip& s : strips)
    for (std::size_t t = 0; t < s.ground_truth.size(); ++t) {
      os << s.sequence_id << "," << t << "," << s.ground_truth[t] << ",";
      if (s.train_visible[t] >= 0)
        os << s.train_visible[t];
      else
        os << "-";
      os << "," << s.pred_with[t] << "," << s.pred_without[t] << "\n";
    }
  return os.str();
}

// red = UC, blue = normal, gray = unlabeled
inline std::string strips_svg(const std::vector<SequenceStrip>& strips) {
  const int cell = 8, gap = 2, track_h = 10, label_w = 120;
  const char* track_names[4] = {"ground truth", "train labels", "with order", "without order"};
  std::size_t max_len = 0;
  for (const auto& s : strips) max_len = std::max(max_len, s.ground_truth.size());
  const int block_h = 4 * track_h + 18;
  const int width = label_w + static_cast<int>(max_len) * cell + 10;
  const int height = static_cast<int>(strips.size()) * block_h + 10;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n";
  auto color = [](int v) { return v == 1 ? "#d62728" : (v == 0 ? "#1f77b4" : "#bbbbbb"); };
  int y = 5;
  for (const SequenceStrip& s : strips) {
    os << "  <text x=\"4\" y=\"" << y + 8 << "\" font-size=\"9\">sequence " << s.sequence_id
       << "</text>\n";
    const std::vector<int>* tracks[4] = {&s.ground_truth, &s.train_visible, &s.pred_with,
                                         &s.pred_without};
    for (int tr = 0; tr < 4; ++tr) {
      const int ty = y + 12 + tr * track_h;
      os << "  <text x=\"4\" y=\"" << ty + 7 << "\" font-size=\"7\">" << track_names[tr]
         << "</text>\n";
      for (std::size_t t = 0; t < tracks[tr]->size(); ++t)
        os << "  <rect x=\"" << label_w + static_cast<int>(t) * cell << "\" y=\"" << ty << "\" width=\""
           << cell - 1 << "\" height=\"" << track_h - gap << "\" fill=\"" << color((*tracks[tr])[t])
           << "\"/>\n";
    }
    y += block_h;
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Randomized gradient-check suite over network/loss configurations, covering
// the frozen-D adversarial routing and the ordinal triples.
// ---------------------------------------------------------------------------

struct GradcheckReport {
  std::size_t trials = 0;
  double max_rel_error = 0.0;
};

namespace detail {

// configurations whose activations sit close to a relu kink or the log clamp
// are resampled; central differences are not meaningful across those points
inline bool evaluation_near_kink(const Graph& g, const Evaluation& ev) {
  for (NodeId id = 0; id < g.size(); ++id) {
    const Node& n = g.node(id);
    if (n.kind == OpKind::Relu) {
      for (double v : ev.values[n.inputs[0]].values)
        if (std::fabs(v) < 5e-4) return true;
    } else if (n.kind == OpKind::LogClamped) {
      for (double v : ev.values[n.inputs[0]].values)
        if (v < 1e-5 || v > 1.0 - 1e-5) return true;
    }
  }
  return false;
}

}  // namespace detail

inline GradcheckReport gradcheck_suite(std::size_t trials, std::uint64_t seed, double h = 1e-5) {
  if (trials == 0) throw ConfigError("gradcheck: trials must be > 0");
  GradcheckReport report;
  std::uint64_t stream = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Rng rng(split_seed(seed, stream++));
      NetworkConfig cfg;
      cfg.input_dim = 3 + rng.index(3);
      cfg.encoder_widths = {4 + rng.index(3)};
      cfg.branch_widths = {3 + rng.index(3)};
      cfg.z_dim = 2 + rng.index(2);

      LossWeights weights;
      weights.lambda_adv = rng.uniform(0.05, 0.5);
      weights.lambda_seq = rng.uniform(0.2, 1.5);
      weights.epsilon = rng.uniform(0.1, 1.0);

      Batch batch;
      const std::size_t n_frags = 1 + rng.index(2);
      for (std::size_t f = 0; f < n_frags; ++f) {
        Fragment frag;
        const std::size_t flen = 3 + rng.index(3);  // always long enough for triples
        for (std::size_t t = 0; t < flen; ++t) {
          BatchRecord r;
          r.features = Tensor::zeros({cfg.input_dim});
          for (double& v : r.features.values) v = rng.gaussian();
          r.location = static_cast<int>(rng.index(3));
          r.uc = rng.bernoulli(0.7) ? std::optional<int>(static_cast<int>(rng.index(2))) : std::nullopt;
          frag.records.push_back(std::move(r));
        }
        batch.fragments.push_back(std::move(frag));
      }
      // make sure the UC-side terms appear in most trials
      if (!batch.fragments[0].records[0].uc.has_value()) batch.fragments[0].records[0].uc = 1;

      Graph g;
      NetGraphBuilder net(g, cfg);
      const AdvForm form = rng.bernoulli(0.85) ? AdvForm::UniformTarget : AdvForm::PrintedSum;
      const BatchLossNodes nodes = build_batch_losses(g, net, batch, weights, form);

      ParamSet params = init(cfg, split_seed(seed, stream++));
      // fan-in init keeps activations small; rescale to exercise honest magnitudes
      for (auto& group : params.groups)
        for (Tensor& t : group)
          for (double& v : t.values) v *= 1.5;
      const Bindings bind = bindings_from(params);
      const Evaluation ev = evaluate(g, bind);
      if (detail::evaluation_near_kink(g, ev)) continue;

      const double err_main = finite_difference_check(
          g, nodes.main_step, bind, h, group_params(params, {"E", "B_u", "B_loc", "C_u", "C_loc"}));
      const double err_d =
          finite_difference_check(g, nodes.d_step, bind, h, group_params(params, {"D_u", "D_loc"}));
      report.max_rel_error = std::max({report.max_rel_error, err_main, err_d});
      ++report.trials;
      break;
    }
  }
  if (report.trials < trials) throw NumericError("gradcheck: could not sample enough clean configurations");
  return report;
}

// ---------------------------------------------------------------------------
// Small file helpers shared by the CLI and tests.
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << body;
  if (!out) throw DataError("write failure: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ogdl
