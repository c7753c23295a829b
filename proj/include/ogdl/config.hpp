#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ogdl/seqgen.hpp"
#include "ogdl/trainer.hpp"

namespace ogdl {

// ---------------------------------------------------------------------------
// Flat key-value run configuration: "<key> = <value>" lines, '#' comments.
// Every default is overridable; unknown keys are usage errors. The effective
// configuration is echoed into each run directory.
// ---------------------------------------------------------------------------

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      cfg.kv_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("config key '" + key + "': not a number: " + it->second);
    }
  }

  std::size_t get_size(const std::string& key, std::size_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(it->second, &used);
      if (used != it->second.size() || v < 0) throw std::invalid_argument("bad");
      return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      throw ConfigError("config key '" + key + "': not a non-negative integer: " + it->second);
    }
  }

  std::vector<std::size_t> get_size_list(const std::string& key, std::vector<std::size_t> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<std::size_t> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      try {
        out.push_back(static_cast<std::size_t>(std::stoull(tok)));
      } catch (const std::logic_error&) {
        throw ConfigError("config key '" + key + "': bad width list: " + it->second);
      }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty width list");
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

  void reject_unknown_keys(const std::set<std::string>& known) const {
    for (const auto& [key, value] : kv_)
      if (!known.count(key)) throw ConfigError("unknown config key: " + key);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> kv_;
};

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "gen.n_sequences", "gen.min_length", "gen.max_length", "gen.input_dim",
      "gen.location_separation", "gen.uc_signal", "gen.noise_sigma", "gen.drift_magnitude",
      "gen.wander_step",
      "gen.uc_self_transition", "gen.uc_positive_prior", "gen.train_ratio", "gen.val_ratio",
      "gen.test_ratio", "gen.labeled_ratio",
      "net.encoder_widths", "net.branch_widths", "net.z_dim", "net.k_u", "net.k_loc",
      "train.method", "train.epochs", "train.batch_fragments", "train.fragment_length",
      "train.learning_rate", "train.momentum", "train.lambda_adv", "train.lambda_seq",
      "train.epsilon", "train.adv_form", "train.pl_threshold", "train.pl_warmup_epochs",
      "train.pl_ramp_fraction", "train.fm_threshold", "train.fm_weak_noise",
      "train.fm_strong_noise", "train.fm_dropout",
  };
  return keys;
}

inline GeneratorConfig generator_config_from(const KeyValueConfig& kv) {
  GeneratorConfig c;
  c.n_sequences = kv.get_size("gen.n_sequences", c.n_sequences);
  c.min_length = kv.get_size("gen.min_length", c.min_length);
  c.max_length = kv.get_size("gen.max_length", c.max_length);
  c.input_dim = kv.get_size("gen.input_dim", c.input_dim);
  c.location_separation = kv.get_double("gen.location_separation", c.location_separation);
  c.uc_signal = kv.get_double("gen.uc_signal", c.uc_signal);
  c.noise_sigma = kv.get_double("gen.noise_sigma", c.noise_sigma);
  c.drift_magnitude = kv.get_double("gen.drift_magnitude", c.drift_magnitude);
  c.wander_step = kv.get_double("gen.wander_step", c.wander_step);
  c.uc_self_transition = kv.get_double("gen.uc_self_transition", c.uc_self_transition);
  c.uc_positive_prior = kv.get_double("gen.uc_positive_prior", c.uc_positive_prior);
  c.train_ratio = kv.get_double("gen.train_ratio", c.train_ratio);
  c.val_ratio = kv.get_double("gen.val_ratio", c.val_ratio);
  c.test_ratio = kv.get_double("gen.test_ratio", c.test_ratio);
  c.labeled_ratio = kv.get_double("gen.labeled_ratio", c.labeled_ratio);
  c.validate();
  return c;
}

// input_dim always comes from the dataset, so it is not a config key here
inline NetworkConfig network_config_from(const KeyValueConfig& kv, std::size_t input_dim) {
  NetworkConfig c;
  c.input_dim = input_dim;
  c.encoder_widths = kv.get_size_list("net.encoder_widths", c.encoder_widths);
  c.branch_widths = kv.get_size_list("net.branch_widths", c.branch_widths);
  c.z_dim = kv.get_size("net.z_dim", c.z_dim);
  c.k_u = kv.get_size("net.k_u", c.k_u);
  c.k_loc = kv.get_size("net.k_loc", c.k_loc);
  c.validate();
  return c;
}

inline TrainConfig train_config_from(const KeyValueConfig& kv) {
  TrainConfig c;
  c.method = method_from_string(kv.get_string("train.method", to_string(c.method)));
  c.epochs = kv.get_size("train.epochs", c.epochs);
  c.batch_fragments = kv.get_size("train.batch_fragments", c.batch_fragments);
  c.fragment_length = kv.get_size("train.fragment_length", c.fragment_length);
  c.learning_rate = kv.get_double("train.learning_rate", c.learning_rate);
  c.momentum = kv.get_double("train.momentum", c.momentum);
  c.weights.lambda_adv = kv.get_double("train.lambda_adv", c.weights.lambda_adv);
  c.weights.lambda_seq = kv.get_double("train.lambda_seq", c.weights.lambda_seq);
  c.weights.epsilon = kv.get_double("train.epsilon", c.weights.epsilon);
  c.adv_form = adv_form_from_string(kv.get_string("train.adv_form", to_string(c.adv_form)));
  c.pl_threshold = kv.get_double("train.pl_threshold", c.pl_threshold);
  c.pl_warmup_epochs = kv.get_size("train.pl_warmup_epochs", c.pl_warmup_epochs);
  c.pl_ramp_fraction = kv.get_double("train.pl_ramp_fraction", c.pl_ramp_fraction);
  c.fm_threshold = kv.get_double("train.fm_threshold", c.fm_threshold);
  c.fm_weak_noise = kv.get_double("train.fm_weak_noise", c.fm_weak_noise);
  c.fm_strong_noise = kv.get_double("train.fm_strong_noise", c.fm_strong_noise);
  c.fm_dropout = kv.get_double("train.fm_dropout", c.fm_dropout);
  c.validate();
  return c;
}

// Canonical echo of every effective setting; written into run directories and
// hashed for provenance.
inline std::string echo_config(const GeneratorConfig& gen, const NetworkConfig& net,
                               const TrainConfig& train, std::uint64_t seed) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto widths = [&](const std::vector<std::size_t>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(w[i]);
    }
    return s;
  };
  os << "gen.n_sequences = " << gen.n_sequences << "\n";
  os << "gen.min_length = " << gen.min_length << "\n";
  os << "gen.max_length = " << gen.max_length << "\n";
  os << "gen.input_dim = " << gen.input_dim << "\n";
  os << "gen.location_separation = " << num(gen.location_separation) << "\n";
  os << "gen.uc_signal = " << num(gen.uc_signal) << "\n";
  os << "gen.noise_sigma = " << num(gen.noise_sigma) << "\n";
  os << "gen.drift_magnitude = " << num(gen.drift_magnitude) << "\n";
  os << "gen.wander_step = " << num(gen.wander_step) << "\n";
  os << "gen.uc_self_transition = " << num(gen.uc_self_transition) << "\n";
  os << "gen.uc_positive_prior = " << num(gen.uc_positive_prior) << "\n";
  os << "gen.train_ratio = " << num(gen.train_ratio) << "\n";
  os << "gen.val_ratio = " << num(gen.val_ratio) << "\n";
  os << "gen.test_ratio = " << num(gen.test_ratio) << "\n";
  os << "gen.labeled_ratio = " << num(gen.labeled_ratio) << "\n";
  os << "net.encoder_widths = " << widths(net.encoder_widths) << "\n";
  os << "net.branch_widths = " << widths(net.branch_widths) << "\n";
  os << "net.z_dim = " << net.z_dim << "\n";
  os << "net.k_u = " << net.k_u << "\n";
  os << "net.k_loc = " << net.k_loc << "\n";
  os << "train.method = " << to_string(train.method) << "\n";
  os << "train.epochs = " << train.epochs << "\n";
  os << "train.batch_fragments = " << train.batch_fragments << "\n";
  os << "train.fragment_length = " << train.fragment_length << "\n";
  os << "train.learning_rate = " << num(train.learning_rate) << "\n";
  os << "train.momentum = " << num(train.momentum) << "\n";
  os << "train.lambda_adv = " << num(train.weights.lambda_adv) << "\n";
  os << "train.lambda_seq = " << num(train.weights.lambda_seq) << "\n";
  os << "train.epsilon = " << num(train.weights.epsilon) << "\n";
  os << "train.adv_form = " << to_string(train.adv_form) << "\n";
  os << "train.pl_threshold = " << num(train.pl_threshold) << "\n";
  os << "train.pl_warmup_epochs = " << train.pl_warmup_epochs << "\n";
  os << "train.pl_ramp_fraction = " << num(train.pl_ramp_fraction) << "\n";
  os << "train.fm_threshold = " << num(train.fm_threshold) << "\n";
  os << "train.fm_weak_noise = " << num(train.fm_weak_noise) << "\n";
  os << "train.fm_strong_noise = " << num(train.fm_strong_noise) << "\n";
  os << "train.fm_dropout = " << num(train.fm_dropout) << "\n";
  os << "seed = " << seed << "\n";
  return os.str();
}

inline std::string config_hash_of(const std::string& echo) { return hex64(fnv1a(echo)); }

}  // namespace ogdl
