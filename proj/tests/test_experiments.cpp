#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ogdl/experiments.hpp"

using namespace ogdl;

namespace {

Dataset mini_dataset(std::uint64_t seed = 19) {
  GeneratorConfig cfg;
  cfg.n_sequences = 14;
  cfg.min_length = 8;
  cfg.max_length = 12;
  cfg.input_dim = 12;
  cfg.labeled_ratio = 0.3;
  return generate(cfg, seed);
}

NetworkConfig mini_net() {
  NetworkConfig cfg;
  cfg.input_dim = 12;
  cfg.encoder_widths = {8};
  cfg.branch_widths = {6};
  cfg.z_dim = 4;
  return cfg;
}

TrainConfig mini_train() {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_fragments = 4;
  return cfg;
}

}  // namespace

TEST_CASE("comparison table has the five expected rows") {
  const Dataset data = mini_dataset();
  const ResultTable table = run_comparison(data, mini_net(), mini_train(), {1});
  REQUIRE(table.rows.size() == 5);
  CHECK(table.rows[0].method == "supervised");
  CHECK(table.rows[0].labeled_ratio == 1.0);
  CHECK(table.rows[1].method == "supervised");
  CHECK(table.rows[1].labeled_ratio == Catch::Approx(0.3));
  CHECK(table.rows[2].method == "pseudo_label");
  CHECK(table.rows[3].method == "fixmatch_lite");
  CHECK(table.rows[4].method == "proposed");

  // single seed: every defined std is exactly zero
  for (const TableRow& r : table.rows)
    for (const MetricStat* s : {&r.precision, &r.recall, &r.f1, &r.specificity, &r.accuracy})
      if (s->stddev.has_value()) CHECK(*s->stddev == 0.0);

  // csv shape: header + 5 rows
  const std::string csv = table.csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.rfind("method,R,precision_mean,precision_std,", 0) == 0);
}

TEST_CASE("comparison output is deterministic") {
  const Dataset data = mini_dataset();
  const std::string a = run_comparison(data, mini_net(), mini_train(), {1, 2}).csv();
  const std::string b = run_comparison(data, mini_net(), mini_train(), {1, 2}).csv();
  CHECK(a == b);
}

TEST_CASE("ablation rows match the comparison protocol where they overlap") {
  const Dataset data = mini_dataset();
  const ResultTable ab = run_ablation(data, mini_net(), mini_train(), {1, 2});
  REQUIRE(ab.rows.size() == 4);
  CHECK(ab.rows[0].method == "supervised");
  CHECK(ab.rows[1].method == "location_multitask");
  CHECK(ab.rows[2].method == "proposed_no_order");
  CHECK(ab.rows[3].method == "proposed");

  const ResultTable cmp = run_comparison(data, mini_net(), mini_train(), {1, 2});
  CHECK(ab.rows[3].accuracy.mean == cmp.rows[4].accuracy.mean);
  CHECK(ab.rows[3].f1.mean == cmp.rows[4].f1.mean);
  CHECK(ab.rows[0].accuracy.mean == cmp.rows[1].accuracy.mean);
}

TEST_CASE("sequence strips align with the dataset and the labeled mask") {
  const Dataset data = mini_dataset();
  const NetworkConfig net_cfg = mini_net();
  const ParamSet a = init(net_cfg, 1);
  const ParamSet b = init(net_cfg, 2);
  const auto strips = sequence_strips(a, b, net_cfg, data, Split::Test);
  REQUIRE_FALSE(strips.empty());
  for (const SequenceStrip& s : strips) {
    const std::size_t len = data.manifest.lengths[s.sequence_id];
    CHECK(s.ground_truth.size() == len);
    CHECK(s.train_visible.size() == len);
    CHECK(s.pred_with.size() == len);
    CHECK(s.pred_without.size() == len);
    for (std::size_t t = 0; t < len; ++t) {
      // test sequences are never in the labeled set, so the training-label
      // track renders unlabeled everywhere
      CHECK(s.train_visible[t] == -1);
      CHECK((s.pred_with[t] == 0 || s.pred_with[t] == 1));
    }
  }

  // train-split strips expose the mask pattern
  const auto train_strips = sequence_strips(a, b, net_cfg, data, Split::Train);
  std::size_t visible = 0, hidden = 0;
  for (const SequenceStrip& s : train_strips)
    for (int v : s.train_visible) (v >= 0 ? visible : hidden)++;
  CHECK(visible == data.manifest.labeled.size());
  CHECK(hidden > 0);
}

TEST_CASE("strip CSV and SVG encode the same label arrays") {
  const Dataset data = mini_dataset();
  const NetworkConfig net_cfg = mini_net();
  const auto strips = sequence_strips(init(net_cfg, 1), init(net_cfg, 2), net_cfg, data, Split::Test);

  // parse the csv back and compare with the in-memory strips
  const std::string csv = strips_csv(strips);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::size_t row = 0, strip_idx = 0, t = 0;
  while (std::getline(lines, line)) {
    if (t >= strips[strip_idx].ground_truth.size()) {
      ++strip_idx;
      t = 0;
    }
    std::istringstream cells(line);
    std::string seq, tt, g, v, pw, po;
    std::getline(cells, seq, ',');
    std::getline(cells, tt, ',');
    std::getline(cells, g, ',');
    std::getline(cells, v, ',');
    std::getline(cells, pw, ',');
    std::getline(cells, po, ',');
    CHECK(std::stoul(seq) == strips[strip_idx].sequence_id);
    CHECK(std::stoi(g) == strips[strip_idx].ground_truth[t]);
    CHECK((v == "-" ? -1 : std::stoi(v)) == strips[strip_idx].train_visible[t]);
    CHECK(std::stoi(pw) == strips[strip_idx].pred_with[t]);
    CHECK(std::stoi(po) == strips[strip_idx].pred_without[t]);
    ++t;
    ++row;
  }
  std::size_t total = 0;
  for (const auto& s : strips) total += s.ground_truth.size();
  CHECK(row == total);

  // the svg renders one rect per track cell from the same arrays
  const std::string svg = strips_svg(strips);
  std::size_t rects = 0, pos = 0;
  while ((pos = svg.find("<rect", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  CHECK(rects == 4 * total);
  // unlabeled cells render gray
  std::size_t grays = 0;
  pos = 0;
  while ((pos = svg.find("#bbbbbb", pos)) != std::string::npos) {
    ++grays;
    pos += 7;
  }
  CHECK(grays == total);  // the whole training-label track of a test split
}

TEST_CASE("probing a checkpoint never mutates it") {
  const Dataset data = mini_dataset();
  const NetworkConfig net_cfg = mini_net();
  const ParamSet params = init(net_cfg, 5);
  const ParamSet before = params;
  auto [features, labels] = probe_inputs_z_u(params, net_cfg, data, Split::Train);
  probe_disentanglement(features, labels, 1);
  CHECK(params.same_bits(before));
}

TEST_CASE("gradcheck suite stays under the tolerance") {
  const GradcheckReport report = gradcheck_suite(25, 77);
  CHECK(report.trials == 25);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("split evaluation matches a hand confusion") {
  const Dataset data = mini_dataset();
  const NetworkConfig net_cfg = mini_net();
  const ParamSet params = init(net_cfg, 9);
  const SplitEvalResult res = evaluate_split(params, net_cfg, data, Split::Val);
  std::size_t val_count = 0;
  for (const auto& r : data.records)
    if (data.manifest.splits[r.sequence_id] == Split::Val) ++val_count;
  CHECK(res.counts.total() == val_count);
}
