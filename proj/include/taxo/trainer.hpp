#pragma once

#include <vector>

#include "taxo/scorer.hpp"

namespace taxo {

enum class StopperLabel : int { Forward = 0, Current = 1, Backward = 2 };

// One training example. Only four label combinations exist:
//   (1, Current)  the true parent,
//   (1, Forward)  an ancestor of the true parent,
//   (1, Backward) a descendant of the true parent,
//   (0, Backward) any other node.
struct AnchorSample {
  TermId query = kNoTerm;
  TermId anchor = kNoTerm;
  int path_label = 0;
  StopperLabel stopper_label = StopperLabel::Backward;
};

// The true parent, up to batch_ancestors_max of its ancestors, up to
// batch_descendants_max of its descendants and a fill of other nodes
// (at least batch_others_min, up to batch_size total when the pools allow).
// The query itself is never an anchor. Throws DataError when q is the root.
std::vector<AnchorSample> sample_anchor_set(const Taxonomy& t, TermId q, const RunConfig& cfg,
                                            Rng& rng);

// eta * mean BCE(path) + (1 - eta) * mean CE(stopper); probabilities are
// clamped at 1e-12 before the logs.
double loss_value(const std::vector<ScoreVector>& scores, const std::vector<AnchorSample>& labels,
                  double eta);

// Same loss assembled inside a graph (for backward).
nn::Graph::Ref build_loss(nn::Graph& g, const std::vector<AnchorScoreRefs>& refs,
                          const std::vector<AnchorSample>& labels, double eta);

// Linear 0 -> lr_peak over the first warmup_frac of steps, then linear back
// to 0 at the end of training.
double lr_at(long step, long total_steps, const RunConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;       // 0 when no validation queries were supplied
  double best_val_acc = 0.0;
};

// Runs cfg.epochs epochs; every non-root seed node serves as the query once
// per epoch (one accumulated optimizer step per query). After each epoch the
// full-mode accuracy on `val` is measured and the best-epoch parameters are
// restored at the end (ties keep the earliest epoch). With an empty `val`
// the final parameters are kept. Throws NumericError on divergence.
TrainHistory train(ScorerModel& model, const Taxonomy& seed, const std::vector<Term>& seed_terms,
                   const std::vector<Query>& val, const RunConfig& cfg);

}  // namespace taxo
