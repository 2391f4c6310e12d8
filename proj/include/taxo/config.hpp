#pragma once

#include <string>

namespace taxo {

enum class ScoringMode { Full, StopperOnly, PathfinderCurrent, CurrentOnly };

ScoringMode parse_scoring_mode(const std::string& name);  // full|stopper|pathcur|current
std::string scoring_mode_name(ScoringMode mode);

// Flat key=value run configuration. Every field has a default; files only
// list overrides. Unknown keys are rejected so typos cannot silently fall
// back to defaults.
struct RunConfig {
  // model
  int d_model = 64;
  int layers = 2;
  int heads = 4;
  int pair_heads = 2;
  int head_hidden = 300;
  int max_depth = 16;
  int child_sample_k = 3;
  int pair_len = 64;
  bool use_abs_level = true;
  bool use_rel_level = true;

  // training
  double eta = 0.9;
  int epochs = 150;
  double lr_peak = 5e-5;
  double warmup_frac = 0.1;
  double weight_decay = 0.01;
  double grad_clip = 1.0;  // global grad-norm ceiling; 0 disables
  int batch_size = 32;
  int batch_ancestors_max = 6;
  int batch_descendants_max = 8;
  int batch_others_min = 16;
  long rng_seed = 42;

  // data / inference
  double test_ratio = 0.2;
  int val_count = 10;
  double root_parent_score = 1e-4;

  void validate() const;  // throws ConfigError
};

RunConfig load_run(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& source_name);
std::string run_config_to_string(const RunConfig& cfg);
void save_run(const std::string& path, const RunConfig& cfg);

}  // namespace taxo
