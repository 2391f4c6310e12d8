#include "taxo/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "taxo/errors.hpp"

namespace taxo {

ScoringMode parse_scoring_mode(const std::string& name) {
  if (name == "full") return ScoringMode::Full;
  if (name == "stopper") return ScoringMode::StopperOnly;
  if (name == "pathcur") return ScoringMode::PathfinderCurrent;
  if (name == "current") return ScoringMode::CurrentOnly;
  throw ConfigError("unknown scoring mode '" + name + "' (expected full|stopper|pathcur|current)");
}

std::string scoring_mode_name(ScoringMode mode) {
  switch (mode) {
    case ScoringMode::Full: return "full";
    case ScoringMode::StopperOnly: return "stopper";
    case ScoringMode::PathfinderCurrent: return "pathcur";
    case ScoringMode::CurrentOnly: return "current";
  }
  return "full";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <class T>
Field int_field(T RunConfig::* member) {
  return {[member](RunConfig& c, const std::string& v) {
            std::size_t used = 0;
            long parsed = std::stol(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            c.*member = static_cast<T>(parsed);
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double RunConfig::* member) {
  return {[member](RunConfig& c, const std::string& v) {
            std::size_t used = 0;
            double parsed = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            c.*member = parsed;
          },
          [member](const RunConfig& c) { return fmt_double(c.*member); }};
}

Field bool_field(bool RunConfig::* member) {
  return {[member](RunConfig& c, const std::string& v) {
            if (v == "true")
              c.*member = true;
            else if (v == "false")
              c.*member = false;
            else
              throw std::invalid_argument(v);
          },
          [member](const RunConfig& c) { return c.*member ? "true" : "false"; }};
}

// Ordered so the config echo is stable and diffable.
const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> kFields = {
      {"d_model", int_field(&RunConfig::d_model)},
      {"layers", int_field(&RunConfig::layers)},
      {"heads", int_field(&RunConfig::heads)},
      {"pair_heads", int_field(&RunConfig::pair_heads)},
      {"head_hidden", int_field(&RunConfig::head_hidden)},
      {"max_depth", int_field(&RunConfig::max_depth)},
      {"child_sample_k", int_field(&RunConfig::child_sample_k)},
      {"pair_len", int_field(&RunConfig::pair_len)},
      {"use_abs_level", bool_field(&RunConfig::use_abs_level)},
      {"use_rel_level", bool_field(&RunConfig::use_rel_level)},
      {"eta", double_field(&RunConfig::eta)},
      {"epochs", int_field(&RunConfig::epochs)},
      {"lr_peak", double_field(&RunConfig::lr_peak)},
      {"warmup_frac", double_field(&RunConfig::warmup_frac)},
      {"weight_decay", double_field(&RunConfig::weight_decay)},
      {"grad_clip", double_field(&RunConfig::grad_clip)},
      {"batch_size", int_field(&RunConfig::batch_size)},
      {"batch_ancestors_max", int_field(&RunConfig::batch_ancestors_max)},
      {"batch_descendants_max", int_field(&RunConfig::batch_descendants_max)},
      {"batch_others_min", int_field(&RunConfig::batch_others_min)},
      {"rng_seed", int_field(&RunConfig::rng_seed)},
      {"test_ratio", double_field(&RunConfig::test_ratio)},
      {"val_count", int_field(&RunConfig::val_count)},
      {"root_parent_score", double_field(&RunConfig::root_parent_score)},
  };
  return kFields;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (d_model <= 0) fail("d_model must be positive");
  if (layers <= 0) fail("layers must be positive");
  if (heads <= 0 || d_model % heads != 0) fail("heads must divide d_model");
  if (pair_heads <= 0 || d_model % pair_heads != 0) fail("pair_heads must divide d_model");
  if (head_hidden <= 0) fail("head_hidden must be positive");
  if (max_depth < 1) fail("max_depth must be at least 1");
  if (child_sample_k < 0) fail("child_sample_k must be non-negative");
  if (pair_len < 5) fail("pair_len must be at least 5");
  if (eta < 0.0 || eta > 1.0) fail("eta must be in [0, 1]");
  if (epochs < 0) fail("epochs must be non-negative");
  if (lr_peak < 0.0) fail("lr_peak must be non-negative");
  if (warmup_frac < 0.0 || warmup_frac >= 1.0) fail("warmup_frac must be in [0, 1)");
  if (weight_decay < 0.0) fail("weight_decay must be non-negative");
  if (grad_clip < 0.0) fail("grad_clip must be non-negative");
  if (batch_size < 1) fail("batch_size must be positive");
  if (batch_ancestors_max < 0 || batch_descendants_max < 0 || batch_others_min < 0)
    fail("batch quotas must be non-negative");
  if (test_ratio < 0.0 || test_ratio >= 1.0) fail("test_ratio must be in [0, 1)");
  if (val_count < 0) fail("val_count must be non-negative");
  if (root_parent_score <= 0.0) fail("root_parent_score must be positive");
}

RunConfig parse_run_config(const std::string& text, const std::string& source_name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end())
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": unknown key '" + key +
                        "'");
    try {
      it->second.set(cfg, value);
    } catch (const std::exception&) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": bad value '" + value +
                        "' for key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

std::string run_config_to_string(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& [key, field] : fields()) out << key << " = " << field.get(cfg) << "\n";
  return out.str();
}

void save_run(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config file: " + path);
  out << run_config_to_string(cfg);
}

}  // namespace taxo
