#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ogdl/rng.hpp"
#include "ogdl/tensor.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Synthetic endoscopic-sequence benchmark. Each sequence walks the colon in
// order (right colon -> left colon -> rectum), so location labels are
// non-decreasing; the UC state forms contiguous runs via a 2-state Markov
// chain; appearance is dominated by the location means and location-specific
// drift, while the UC signal is a small shift along a per-location texture
// direction orthogonal to the location means. The texture signature depending
// on the location is what makes few-label UC classification hard and the
// location side information valuable.
// ---------------------------------------------------------------------------

struct SequenceRecord {
  std::uint32_t sequence_id = 0;
  std::uint32_t t = 0;  // 0-based index within the sequence
  Tensor features;
  int location = 0;            // 0 right colon, 1 left colon, 2 rectum
  std::optional<int> uc;       // 0 negative, 1 positive; nullopt when unknown
};

enum class Split { Train = 0, Val = 1, Test = 2 };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    default: return "test";
  }
}

inline Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ConfigError("unknown split: " + s);
}

struct GeneratorConfig {
  std::size_t n_sequences = 120;
  std::size_t min_length = 20;
  std::size_t max_length = 40;
  std::size_t input_dim = 32;
  double location_separation = 4.0;  // pairwise distance between location means
  double uc_signal = 3.0;            // shift along the location texture direction for UC frames
  double noise_sigma = 1.0;
  double drift_magnitude = 1.0;      // within-segment sweep along the location drift axis
  double wander_step = 0.3;          // per-frame step of the smooth appearance random walk
  double uc_self_transition = 0.9;   // probability of staying in the UC state
  double uc_positive_prior = 0.65;   // stationary probability of the UC state
  double train_ratio = 0.7;
  double val_ratio = 0.2;
  double test_ratio = 0.1;
  double labeled_ratio = 0.1;        // R

  void validate() const {
    if (n_sequences == 0) throw ConfigError("generator: n_sequences must be > 0");
    if (min_length == 0 || max_length < min_length) throw ConfigError("generator: bad length bounds");
    if (input_dim < 5) throw ConfigError("generator: input_dim must be >= 5");
    if (!(location_separation > 0.0) || !(uc_signal >= 0.0) || !(noise_sigma > 0.0))
      throw ConfigError("generator: separation/signal/noise out of range");
    if (drift_magnitude < 0.0) throw ConfigError("generator: drift_magnitude must be >= 0");
    if (wander_step < 0.0) throw ConfigError("generator: wander_step must be >= 0");
    if (uc_self_transition < 0.0 || uc_self_transition > 1.0)
      throw ConfigError("generator: uc_self_transition must be in [0,1]");
    if (uc_positive_prior < 0.0 || uc_positive_prior > 1.0)
      throw ConfigError("generator: uc_positive_prior must be in [0,1]");
    if (std::fabs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
      throw ConfigError("generator: split ratios must sum to 1");
    if (!(labeled_ratio > 0.0) || labeled_ratio > 1.0)
      throw ConfigError("generator: labeled_ratio must be in (0,1]");
    // the chain needs a valid exit probability from the negative state
    if (uc_positive_prior < 1.0) {
      const double p01 = (1.0 - uc_self_transition) * uc_positive_prior / (1.0 - uc_positive_prior);
      if (p01 > 1.0) throw ConfigError("generator: uc prior/self-transition combination infeasible");
    }
  }
};

struct DatasetManifest {
  int format_version = 1;
  std::uint64_t seed = 0;
  GeneratorConfig config;
  std::string config_hash;
  std::vector<std::uint32_t> lengths;                            // per sequence id
  std::vector<Split> splits;                                     // per sequence id
  std::vector<std::pair<std::uint32_t, std::uint32_t>> labeled;  // (sequence_id, t), sorted
  double labeled_ratio = 0.0;
  std::uint64_t record_count = 0;
  std::string records_hash;  // FNV-1a of the records file, set on save

  bool is_labeled(std::uint32_t seq, std::uint32_t t) const {
    return std::binary_search(labeled.begin(), labeled.end(), std::make_pair(seq, t));
  }
};

// ---------------------------------------------------------------------------
// Hashing (FNV-1a 64) for config provenance and records-file integrity.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string generator_config_canonical(const GeneratorConfig& c) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "n_sequences=" << c.n_sequences << ";min_length=" << c.min_length
     << ";max_length=" << c.max_length << ";input_dim=" << c.input_dim
     << ";location_separation=" << num(c.location_separation) << ";uc_signal=" << num(c.uc_signal)
     << ";noise_sigma=" << num(c.noise_sigma) << ";drift_magnitude=" << num(c.drift_magnitude)
     << ";wander_step=" << num(c.wander_step)
     << ";uc_self_transition=" << num(c.uc_self_transition)
     << ";uc_positive_prior=" << num(c.uc_positive_prior) << ";train_ratio=" << num(c.train_ratio)
     << ";val_ratio=" << num(c.val_ratio) << ";test_ratio=" << num(c.test_ratio)
     << ";labeled_ratio=" << num(c.labeled_ratio);
  return os.str();
}

inline std::string generator_config_hash(const GeneratorConfig& c) {
  return hex64(fnv1a(generator_config_canonical(c)));
}

// ---------------------------------------------------------------------------
// Generation.
// ---------------------------------------------------------------------------

namespace detail {

// location means: an equilateral triangle of side `sep` in coordinates 0/1
inline std::vector<Tensor> location_means(std::size_t dim, double sep) {
  std::vector<Tensor> mu(3, Tensor::zeros({dim}));
  mu[1][0] = sep;
  mu[2][0] = sep * 0.5;
  mu[2][1] = sep * 0.8660254037844386;  // sqrt(3)/2
  return mu;
}

// segment boundaries: every location present for T >= 3, labels non-decreasing
inline std::vector<int> location_track(std::size_t len, Rng& rng) {
  std::vector<int> loc(len, 0);
  if (len == 1) return loc;
  if (len == 2) {
    loc[1] = 1;
    return loc;
  }
  // two distinct cut points in [1, len-1]
  std::size_t c1 = 1 + rng.index(len - 1);
  std::size_t c2 = 1 + rng.index(len - 2);
  if (c2 >= c1) ++c2;
  if (c1 > c2) std::swap(c1, c2);
  for (std::size_t t = 0; t < len; ++t) loc[t] = t < c1 ? 0 : (t < c2 ? 1 : 2);
  return loc;
}

// 2-state chain with P(stay|UC) = rho and stationary positive mass pi
inline std::vector<int> uc_track(std::size_t len, double rho, double pi, Rng& rng) {
  std::vector<int> uc(len);
  if (pi <= 0.0 || pi >= 1.0) {
    std::fill(uc.begin(), uc.end(), pi >= 1.0 ? 1 : 0);
    return uc;
  }
  const double p10 = 1.0 - rho;             // leave the UC state
  const double p01 = p10 * pi / (1.0 - pi); // detailed balance
  uc[0] = rng.bernoulli(pi) ? 1 : 0;
  for (std::size_t t = 1; t < len; ++t) {
    const double flip = uc[t - 1] ? p10 : p01;
    uc[t] = rng.bernoulli(flip) ? 1 - uc[t - 1] : uc[t - 1];
  }
  return uc;
}

// The texture signature of UC depends on the colon section: three unit
// directions in the coordinate 2/3 plane, orthogonal to the location means,
// with the rectum signature opposing the colon ones. No single linear
// readout fits all three, so the UC rule is location-conditional by
// construction.
inline std::vector<Tensor> texture_directions(std::size_t dim) {
  std::vector<Tensor> tau(3, Tensor::zeros({dim}));
  tau[0][2] = 1.0;
  tau[1][3] = 1.0;
  const double r = -1.0 / std::sqrt(2.0);
  tau[2][2] = r;
  tau[2][3] = r;
  return tau;
}

// random unit direction orthogonal to all texture axes
inline Tensor drift_direction(std::size_t dim, Rng& rng) {
  Tensor d = Tensor::zeros({dim});
  double norm2 = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) d[i] = rng.gaussian();
    d[2] = d[3] = d[4] = 0.0;
    norm2 = 0.0;
    for (double v : d.values) norm2 += v * v;
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : d.values) v *= inv;
  return d;
}

// Appearance change while the scope moves differs per colon section, so each
// location owns a fixed drift subspace (two orthonormal directions, disjoint
// from the location-mean plane and the texture axes). Dimensions below 11
// cannot host the full basis and fall back to unstructured directions.
inline std::vector<std::vector<Tensor>> location_drift_bases(std::size_t dim, std::uint64_t seed) {
  std::vector<std::vector<Tensor>> bases(3);
  if (dim < 11) return bases;
  Rng rng(seed);
  std::vector<Tensor> accepted;
  for (std::size_t loc = 0; loc < 3; ++loc)
    for (int k = 0; k < 2; ++k) {
      Tensor v = Tensor::zeros({dim});
      double norm2 = 0.0;
      while (norm2 < 1e-6) {
        for (std::size_t i = 5; i < dim; ++i) v[i] = rng.gaussian();
        for (const Tensor& u : accepted) {
          double dot = 0.0;
          for (std::size_t i = 5; i < dim; ++i) dot += v[i] * u[i];
          for (std::size_t i = 5; i < dim; ++i) v[i] -= dot * u[i];
        }
        norm2 = 0.0;
        for (double x : v.values) norm2 += x * x;
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& x : v.values) x *= inv;
      accepted.push_back(v);
      bases[loc].push_back(std::move(v));
    }
  return bases;
}

// Per-segment drift direction: anchored on the segment location's primary
// drift axis with a random tilt into the secondary one, so the drift offsets
// carry a first-order location signature.
inline Tensor segment_drift_direction(const std::vector<std::vector<Tensor>>& bases, int location,
                                      std::size_t dim, Rng& rng) {
  if (bases[static_cast<std::size_t>(location)].empty()) return drift_direction(dim, rng);
  const auto& basis = bases[static_cast<std::size_t>(location)];
  const double a = 1.0;
  const double b = 0.35 * rng.gaussian();
  const double norm = std::sqrt(a * a + b * b);
  Tensor d = Tensor::zeros({dim});
  for (std::size_t i = 0; i < dim; ++i) d[i] = (a * basis[0][i] + b * basis[1][i]) / norm;
  return d;
}

}  // namespace detail

struct Dataset {
  std::vector<SequenceRecord> records;
  DatasetManifest manifest;
};

inline void split_by_sequence(Dataset& data, double train_ratio, double val_ratio, double test_ratio,
                              std::uint64_t seed);
inline void mask_labels(Dataset& data, double labeled_ratio, std::uint64_t seed);

// Deterministic generation; each sequence draws from its own child stream so
// the record stream is reproducible regardless of generation order.
inline Dataset generate(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Dataset data;
  data.manifest.seed = seed;
  data.manifest.config = cfg;
  data.manifest.config_hash = generator_config_hash(cfg);
  data.manifest.lengths.resize(cfg.n_sequences);
  data.manifest.splits.assign(cfg.n_sequences, Split::Train);

  const std::vector<Tensor> mu = detail::location_means(cfg.input_dim, cfg.location_separation);
  const std::vector<Tensor> tau = detail::texture_directions(cfg.input_dim);
  const auto drift_bases =
      detail::location_drift_bases(cfg.input_dim, split_seed(seed, 0xD21F'7BA5'0001ULL));

  for (std::uint32_t i = 0; i < cfg.n_sequences; ++i) {
    Rng rng(split_seed(seed, i));
    const std::size_t len = cfg.min_length + rng.index(cfg.max_length - cfg.min_length + 1);
    data.manifest.lengths[i] = static_cast<std::uint32_t>(len);

    const std::vector<int> loc = detail::location_track(len, rng);
    const std::vector<int> uc = detail::uc_track(len, cfg.uc_self_transition, cfg.uc_positive_prior, rng);

    // per-segment drift: appearance evolves monotonically while the scope
    // traverses a section, a 0 -> drift_magnitude sweep along the segment's
    // drift direction
    std::vector<Tensor> seg_dir;
    std::vector<std::size_t> seg_start, seg_len;
    for (std::size_t t = 0; t < len; ++t) {
      if (t == 0 || loc[t] != loc[t - 1]) {
        seg_dir.push_back(detail::segment_drift_direction(drift_bases, loc[t], cfg.input_dim, rng));
        seg_start.push_back(t);
        seg_len.push_back(0);
      }
      ++seg_len.back();
    }

    // The appearance trajectory inside a segment is smooth: a monotone sweep
    // along the segment's drift direction plus a random walk; per-frame
    // sensor noise sits on top. The walk stays off the texture axes so the
    // UC signal keeps its per-frame scale.
    std::size_t seg = 0;
    Tensor wander = Tensor::zeros({cfg.input_dim});
    for (std::size_t t = 0; t < len; ++t) {
      if (seg + 1 < seg_start.size() && t >= seg_start[seg + 1]) {
        ++seg;
        wander = Tensor::zeros({cfg.input_dim});
      } else if (t > 0) {
        for (std::size_t d = 5; d < cfg.input_dim; ++d)
          wander[d] += cfg.wander_step * cfg.noise_sigma * rng.gaussian();
      }
      SequenceRecord rec;
      rec.sequence_id = i;
      rec.t = static_cast<std::uint32_t>(t);
      rec.location = loc[t];
      rec.uc = uc[t];
      rec.features = mu[loc[t]];
      const double ramp =
          seg_len[seg] > 1
              ? static_cast<double>(t - seg_start[seg]) / static_cast<double>(seg_len[seg] - 1)
              : 0.0;
      for (std::size_t d = 0; d < cfg.input_dim; ++d) {
        rec.features[d] += cfg.drift_magnitude * ramp * seg_dir[seg][d] + wander[d];
        rec.features[d] += cfg.noise_sigma * rng.gaussian();
      }
      if (uc[t])
        for (std::size_t d = 0; d < cfg.input_dim; ++d)
          rec.features[d] += cfg.uc_signal * tau[static_cast<std::size_t>(loc[t])][d];
      data.records.push_back(std::move(rec));
    }
  }
  data.manifest.record_count = data.records.size();

  split_by_sequence(data, cfg.train_ratio, cfg.val_ratio, cfg.test_ratio,
                    split_seed(seed, 0x5354'1700'0001ULL));
  mask_labels(data, cfg.labeled_ratio, split_seed(seed, 0x4d41'534b'0001ULL));
  return data;
}

// Assigns whole sequences to splits so record proportions approximate the
// ratios; no sequence straddles two splits. Resets the labeled set.
inline void split_by_sequence(Dataset& data, double train_ratio, double val_ratio, double test_ratio,
                              std::uint64_t seed) {
  if (std::fabs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
    throw ConfigError("split ratios must sum to 1");
  const std::size_t n = data.manifest.lengths.size();
  std::size_t wanted_splits = 0;
  for (double r : {train_ratio, val_ratio, test_ratio})
    if (r > 0.0) ++wanted_splits;
  if (n < wanted_splits) throw DataError("fewer sequences than splits");

  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const double total = static_cast<double>(data.manifest.record_count);
  const double train_target = train_ratio * total;
  const double val_target = (train_ratio + val_ratio) * total;
  double seen = 0.0;
  for (std::uint32_t id : order) {
    Split s;
    if (seen < train_target)
      s = Split::Train;
    else if (seen < val_target)
      s = Split::Val;
    else
      s = Split::Test;
    data.manifest.splits[id] = s;
    seen += static_cast<double>(data.manifest.lengths[id]);
  }
  data.manifest.labeled.clear();
  data.manifest.labeled_ratio = 0.0;
}

// Samples floor(R * train-record-count) train records into the labeled set.
// UC labels outside it are hidden from training but stay available to
// evaluation; location labels are always visible.
inline void mask_labels(Dataset& data, double labeled_ratio, std::uint64_t seed) {
  if (!(labeled_ratio > 0.0) || labeled_ratio > 1.0) throw ConfigError("labeled ratio must be in (0,1]");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;
  for (const SequenceRecord& r : data.records)
    if (data.manifest.splits[r.sequence_id] == Split::Train) candidates.emplace_back(r.sequence_id, r.t);
  std::sort(candidates.begin(), candidates.end());
  Rng rng(seed);
  rng.shuffle(candidates);
  const std::size_t take = static_cast<std::size_t>(labeled_ratio * static_cast<double>(candidates.size()));
  candidates.resize(take);
  std::sort(candidates.begin(), candidates.end());
  data.manifest.labeled = std::move(candidates);
  data.manifest.labeled_ratio = labeled_ratio;
}

// ---------------------------------------------------------------------------
// Persistence. A dataset is two files under one stem:
//   <stem>.records        one record per line:
//                         sequence_id,t,location,uc-or-empty,v0,...,v{D-1}
//   <stem>.manifest.json  counts, splits, labeled set, seed, hashes
// ---------------------------------------------------------------------------

inline std::string records_to_string(const std::vector<SequenceRecord>& records) {
  std::ostringstream os;
  char buf[64];
  for (const SequenceRecord& r : records) {
    os << r.sequence_id << "," << r.t << "," << r.location << ",";
    if (r.uc.has_value()) os << *r.uc;
    for (double v : r.features.values) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

inline void save(const Dataset& data, const std::string& stem) {
  const std::string body = records_to_string(data.records);
  {
    std::ofstream out(stem + ".records", std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + stem + ".records");
    out << body;
    if (!out) throw DataError("write failure: " + stem + ".records");
  }
  nlohmann::json j;
  j["format_version"] = 1;
  j["seed"] = data.manifest.seed;
  const GeneratorConfig& c = data.manifest.config;
  j["config"] = {{"n_sequences", c.n_sequences},
                 {"min_length", c.min_length},
                 {"max_length", c.max_length},
                 {"input_dim", c.input_dim},
                 {"location_separation", c.location_separation},
                 {"uc_signal", c.uc_signal},
                 {"noise_sigma", c.noise_sigma},
                 {"drift_magnitude", c.drift_magnitude},
                 {"wander_step", c.wander_step},
                 {"uc_self_transition", c.uc_self_transition},
                 {"uc_positive_prior", c.uc_positive_prior},
                 {"train_ratio", c.train_ratio},
                 {"val_ratio", c.val_ratio},
                 {"test_ratio", c.test_ratio},
                 {"labeled_ratio", c.labeled_ratio}};
  j["config_hash"] = data.manifest.config_hash;
  j["lengths"] = data.manifest.lengths;
  std::vector<std::string> split_names;
  for (Split s : data.manifest.splits) split_names.push_back(to_string(s));
  j["splits"] = split_names;
  j["labeled"] = data.manifest.labeled;
  j["labeled_ratio"] = data.manifest.labeled_ratio;
  j["record_count"] = data.records.size();
  j["records_hash"] = hex64(fnv1a(body));

  std::ofstream out(stem + ".manifest.json");
  if (!out) throw DataError("cannot open for writing: " + stem + ".manifest.json");
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failure: " + stem + ".manifest.json");
}

inline Dataset load(const std::string& stem) {
  Dataset data;
  nlohmann::json j;
  {
    std::ifstream in(stem + ".manifest.json");
    if (!in) throw DataError("cannot open manifest: " + stem + ".manifest.json");
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corrupt manifest: " + std::string(e.what()));
    }
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw DataError("unsupported dataset format version");
    DatasetManifest& m = data.manifest;
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& jc = j.at("config");
    GeneratorConfig& c = m.config;
    c.n_sequences = jc.at("n_sequences").get<std::size_t>();
    c.min_length = jc.at("min_length").get<std::size_t>();
    c.max_length = jc.at("max_length").get<std::size_t>();
    c.input_dim = jc.at("input_dim").get<std::size_t>();
    c.location_separation = jc.at("location_separation").get<double>();
    c.uc_signal = jc.at("uc_signal").get<double>();
    c.noise_sigma = jc.at("noise_sigma").get<double>();
    c.drift_magnitude = jc.at("drift_magnitude").get<double>();
    c.wander_step = jc.at("wander_step").get<double>();
    c.uc_self_transition = jc.at("uc_self_transition").get<double>();
    c.uc_positive_prior = jc.at("uc_positive_prior").get<double>();
    c.train_ratio = jc.at("train_ratio").get<double>();
    c.val_ratio = jc.at("val_ratio").get<double>();
    c.test_ratio = jc.at("test_ratio").get<double>();
    c.labeled_ratio = jc.at("labeled_ratio").get<double>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.lengths = j.at("lengths").get<std::vector<std::uint32_t>>();
    for (const auto& s : j.at("splits")) m.splits.push_back(split_from_string(s.get<std::string>()));
    for (const auto& p : j.at("labeled"))
      m.labeled.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
    m.labeled_ratio = j.at("labeled_ratio").get<double>();
    m.record_count = j.at("record_count").get<std::uint64_t>();
    m.records_hash = j.at("records_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt manifest: " + std::string(e.what()));
  }

  std::string body;
  {
    std::ifstream in(stem + ".records", std::ios::binary);
    if (!in) throw DataError("cannot open records: " + stem + ".records");
    std::ostringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  if (hex64(fnv1a(body)) != data.manifest.records_hash)
    throw DataError("records file does not match manifest hash (corrupt or mismatched files)");

  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    SequenceRecord rec;
    std::size_t pos = 0;
    auto next_field = [&]() {
      const std::size_t comma = line.find(',', pos);
      std::string f = comma == std::string::npos ? line.substr(pos) : line.substr(pos, comma - pos);
      pos = comma == std::string::npos ? line.size() : comma + 1;
      return f;
    };
    try {
      rec.sequence_id = static_cast<std::uint32_t>(std::stoul(next_field()));
      rec.t = static_cast<std::uint32_t>(std::stoul(next_field()));
      rec.location = std::stoi(next_field());
      const std::string ucf = next_field();
      if (!ucf.empty()) rec.uc = std::stoi(ucf);
      std::vector<double> vals;
      vals.reserve(data.manifest.config.input_dim);
      while (pos < line.size()) vals.push_back(std::stod(next_field()));
      if (vals.size() != data.manifest.config.input_dim) throw DataError("record with wrong feature count");
      rec.features = Tensor::vec(std::move(vals));
    } catch (const std::logic_error&) {
      throw DataError("malformed record line: " + line.substr(0, 40));
    }
    data.records.push_back(std::move(rec));
  }
  if (data.records.size() != data.manifest.record_count)
    throw DataError("record count mismatch: manifest says " + std::to_string(data.manifest.record_count) +
                    ", file has " + std::to_string(data.records.size()));
  return data;
}

}  // namespace ogdl
