// Command-line surface: dataset generation, training, evaluation, the
// comparison/ablation drivers, prediction strips and the gradient-check
// oracle suite.
//
// Exit codes: 0 success, 1 usage error, 2 data/integrity error,
// 3 numeric failure (non-finite values).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ogdl/config.hpp"
#include "ogdl/experiments.hpp"
#include "ogdl/network.hpp"
#include "ogdl/seqgen.hpp"
#include "ogdl/trainer.hpp"

namespace fs = std::filesystem;
using namespace ogdl;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      seeds.push_back(std::stoull(tok));
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list entry: " + tok);
    }
  }
  if (seeds.empty()) throw ConfigError("empty seeds list");
  return seeds;
}

KeyValueConfig load_kv(const std::string& config_path) {
  KeyValueConfig kv;
  if (!config_path.empty()) kv = KeyValueConfig::from_file(config_path);
  kv.reject_unknown_keys(known_config_keys());
  return kv;
}

void print_metrics_row(const std::string& label, const MetricsReport& m) {
  std::printf("%-22s P=%-8s R=%-8s F1=%-8s Spec=%-8s Acc=%-8s\n", label.c_str(),
              format_metric(m.precision).c_str(), format_metric(m.recall).c_str(),
              format_metric(m.f1).c_str(), format_metric(m.specificity).c_str(),
              format_metric(m.accuracy).c_str());
}

void print_table(const ResultTable& table) {
  auto cell = [](const MetricStat& s) {
    if (!s.mean.has_value()) return std::string("-");
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f+-%.2f", *s.mean, *s.stddev);
    return std::string(buf);
  };
  std::printf("%-20s %-5s %-14s %-14s %-14s %-14s %-14s\n", "method", "R", "precision", "recall",
              "f1", "specificity", "accuracy");
  for (const TableRow& r : table.rows)
    std::printf("%-20s %-5.2f %-14s %-14s %-14s %-14s %-14s\n", r.method.c_str(), r.labeled_ratio,
                cell(r.precision).c_str(), cell(r.recall).c_str(), cell(r.f1).c_str(),
                cell(r.specificity).c_str(), cell(r.accuracy).c_str());
}

std::string epoch_metrics_csv(const TrainResult& result) {
  std::ostringstream os;
  os << "epoch,loss_c_u,loss_c_loc,loss_d_u,loss_d_loc,loss_adv_u,loss_adv_loc,loss_seq,"
        "val_accuracy,pseudo_labeled\n";
  char buf[64];
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    const EpochStats& s = result.history[e];
    os << e;
    for (double v : {s.losses.c_u, s.losses.c_loc, s.losses.d_u, s.losses.d_loc, s.losses.adv_u,
                     s.losses.adv_loc, s.losses.seq, s.val_accuracy}) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      os << buf;
    }
    os << "," << s.pseudo_labeled << "\n";
  }
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"order-guided disentangled representation learning on sequence benchmarks"};
  app.require_subcommand(1);

  std::string config_path, data_stem, out_dir, ckpt_path, ckpt_with, ckpt_without;
  std::string split_name = "test", seeds_text = "1,2,3,4,5";
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::size_t trials = 120;
  double fd_step = 1e-5;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", config_path, "flat key-value config file");
    cmd->add_option("--seed", seed, "run seed")->each([&](const std::string&) { seed_given = true; });
    if (with_out) cmd->add_option("--out", out_dir, "output directory")->required();
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic sequence dataset");
  add_common(gen, true);

  CLI::App* train_cmd = app.add_subcommand("train", "train one method on a dataset");
  add_common(train_cmd, true);
  train_cmd->add_option("--data", data_stem, "dataset stem (as written by gen)")->required();

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  eval_cmd->add_option("--data", data_stem)->required();
  eval_cmd->add_option("--ckpt", ckpt_path)->required();
  eval_cmd->add_option("--split", split_name, "train|val|test");
  eval_cmd->add_option("--out", out_dir, "optional output directory for metrics.csv");

  CLI::App* compare = app.add_subcommand("compare", "comparison table over methods and seeds");
  add_common(compare, true);
  compare->add_option("--data", data_stem)->required();
  compare->add_option("--seeds", seeds_text, "comma-separated seed list");

  CLI::App* ablate = app.add_subcommand("ablate", "ablation table over the method variants");
  add_common(ablate, true);
  ablate->add_option("--data", data_stem)->required();
  ablate->add_option("--seeds", seeds_text, "comma-separated seed list");

  CLI::App* strips = app.add_subcommand("strips", "per-sequence prediction strips (CSV + SVG)");
  strips->add_option("--data", data_stem)->required();
  strips->add_option("--with", ckpt_with, "checkpoint trained with the ordinal term")->required();
  strips->add_option("--without", ckpt_without, "checkpoint trained without it")->required();
  strips->add_option("--split", split_name, "train|val|test");
  strips->add_option("--out", out_dir)->required();

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "randomized finite-difference oracle suite");
  gradcheck->add_option("--trials", trials, "number of random configurations");
  gradcheck->add_option("--seed", seed, "suite seed");
  gradcheck->add_option("--step", fd_step, "central-difference step");

  std::string probe_target = "loc", probe_features = "z_u";
  CLI::App* probe_cmd = app.add_subcommand("probe", "linear probe on frozen features");
  probe_cmd->add_option("--data", data_stem)->required();
  probe_cmd->add_option("--ckpt", ckpt_path, "checkpoint; omit to probe raw inputs");
  probe_cmd->add_option("--target", probe_target, "loc|uc");
  probe_cmd->add_option("--features", probe_features, "z_u|z_loc|x");
  probe_cmd->add_option("--split", split_name, "train|val|test");
  probe_cmd->add_option("--seed", seed, "probe split/shuffle seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    const KeyValueConfig kv = load_kv(config_path);
    const GeneratorConfig gen_cfg = generator_config_from(kv);
    const Dataset data = generate(gen_cfg, seed);
    fs::create_directories(out_dir);
    save(data, out_dir + "/dataset");
    const std::string echo = echo_config(gen_cfg, network_config_from(kv, gen_cfg.input_dim),
                                         train_config_from(kv), seed);
    write_text_file(out_dir + "/config.txt", echo);
    std::size_t positives = 0;
    for (const auto& r : data.records) positives += (r.uc.value_or(0) == 1) ? 1 : 0;
    std::printf("wrote %s/dataset.records (%zu records, %zu sequences, %zu labeled, %.3f positive)\n",
                out_dir.c_str(), data.records.size(), data.manifest.lengths.size(),
                data.manifest.labeled.size(),
                static_cast<double>(positives) / static_cast<double>(data.records.size()));
    return 0;
  }

  if (train_cmd->parsed()) {
    const KeyValueConfig kv = load_kv(config_path);
    const Dataset data = load(data_stem);
    const NetworkConfig net_cfg = network_config_from(kv, data.manifest.config.input_dim);
    TrainConfig cfg = train_config_from(kv);
    if (seed_given) cfg.seed = seed;

    const TrainResult result = train(data, net_cfg, cfg);

    fs::create_directories(out_dir);
    const std::string echo = echo_config(data.manifest.config, net_cfg, cfg, cfg.seed);
    write_text_file(out_dir + "/config.txt", echo);
    write_text_file(out_dir + "/metrics.csv", epoch_metrics_csv(result));
    save_checkpoint(out_dir + "/checkpoint.ckpt", result.best_params);
    save_checkpoint(out_dir + "/checkpoint_final.ckpt", result.final_params);
    std::ostringstream log;
    log << "method = " << to_string(cfg.method) << "\n"
        << "seed = " << cfg.seed << "\n"
        << "config_hash = " << config_hash_of(echo) << "\n"
        << "dataset_config_hash = " << data.manifest.config_hash << "\n"
        << "epochs_run = " << result.history.size() << "\n"
        << "selected_epoch = " << result.selected_epoch << "\n";
    char accbuf[32];
    std::snprintf(accbuf, sizeof accbuf, "%.6f", result.best_val_accuracy);
    log << "best_val_accuracy = " << accbuf << "\n";
    write_text_file(out_dir + "/run.log", log.str());
    std::printf("%s: best val accuracy %.4f at epoch %zu (checkpoint in %s)\n",
                to_string(cfg.method).c_str(), result.best_val_accuracy, result.selected_epoch,
                out_dir.c_str());
    return 0;
  }

  if (eval_cmd->parsed()) {
    const Dataset data = load(data_stem);
    const ParamSet params = load_checkpoint(ckpt_path);
    const NetworkConfig cfg = config_from_params(params);
    if (cfg.input_dim != data.manifest.config.input_dim)
      throw DataError("checkpoint input width does not match dataset");
    const SplitEvalResult res = evaluate_split(params, cfg, data, split_from_string(split_name));
    print_metrics_row(split_name, res.report);
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::ostringstream os;
      os << "split,precision,recall,f1,specificity,accuracy\n"
         << split_name << "," << format_metric(res.report.precision, "") << ","
         << format_metric(res.report.recall, "") << "," << format_metric(res.report.f1, "") << ","
         << format_metric(res.report.specificity, "") << ","
         << format_metric(res.report.accuracy, "") << "\n";
      write_text_file(out_dir + "/metrics.csv", os.str());
    }
    return 0;
  }

  if (compare->parsed() || ablate->parsed()) {
    const KeyValueConfig kv = load_kv(config_path);
    const Dataset data = load(data_stem);
    const NetworkConfig net_cfg = network_config_from(kv, data.manifest.config.input_dim);
    const TrainConfig base = train_config_from(kv);
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);

    const bool is_compare = compare->parsed();
    const ResultTable table = is_compare ? run_comparison(data, net_cfg, base, seeds)
                                         : run_ablation(data, net_cfg, base, seeds);
    fs::create_directories(out_dir);
    const std::string name = is_compare ? "comparison.csv" : "ablation.csv";
    write_text_file(out_dir + "/" + name, table.csv());
    write_text_file(out_dir + "/config.txt", echo_config(data.manifest.config, net_cfg, base, 0));
    print_table(table);
    std::printf("wrote %s/%s\n", out_dir.c_str(), name.c_str());
    return 0;
  }

  if (strips->parsed()) {
    const Dataset data = load(data_stem);
    const ParamSet with_order = load_checkpoint(ckpt_with);
    const ParamSet without_order = load_checkpoint(ckpt_without);
    const NetworkConfig cfg = config_from_params(with_order);
    const auto result =
        sequence_strips(with_order, without_order, cfg, data, split_from_string(split_name));
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/strips.csv", strips_csv(result));
    write_text_file(out_dir + "/strips.svg", strips_svg(result));
    std::printf("wrote strips for %zu sequences to %s\n", result.size(), out_dir.c_str());
    return 0;
  }

  if (probe_cmd->parsed()) {
    const Dataset data = load(data_stem);
    const auto indices = split_record_indices(data, split_from_string(split_name));
    std::vector<Tensor> features;
    if (probe_features == "x") {
      for (std::size_t idx : indices) features.push_back(data.records[idx].features);
    } else {
      if (ckpt_path.empty()) throw ConfigError("probing network features requires --ckpt");
      const ParamSet params = load_checkpoint(ckpt_path);
      const NetworkConfig cfg = config_from_params(params);
      const SplitEvaluator ev(cfg, data, indices);
      auto out = ev.run(params, /*want_features=*/true);
      features = probe_features == "z_loc" ? std::move(out.z_loc) : std::move(out.z_u);
    }
    std::vector<int> labels;
    for (std::size_t idx : indices) {
      if (probe_target == "uc") {
        if (!data.records[idx].uc.has_value()) throw DataError("record without UC label");
        labels.push_back(*data.records[idx].uc);
      } else {
        labels.push_back(data.records[idx].location);
      }
    }
    const double acc = probe_disentanglement(features, labels, seed);
    std::printf("probe %s from %s on %s: held-out accuracy %.4f\n", probe_target.c_str(),
                probe_features.c_str(), split_name.c_str(), acc);
    return 0;
  }

  if (gradcheck->parsed()) {
    const GradcheckReport report = gradcheck_suite(trials, seed, fd_step);
    std::printf("gradcheck: %zu configurations, max relative error %.3g (h=%.1g)\n", report.trials,
                report.max_rel_error, fd_step);
    if (report.max_rel_error >= 1e-4) {
      std::fprintf(stderr, "gradcheck FAILED: max relative error %.3g >= 1e-4\n", report.max_rel_error);
      return 3;
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
