#pragma once

#include <vector>

#include "taxo/scorer.hpp"

namespace taxo {

// One ScoreVector per seed node, indexed by TermId.
using ScoreTable = std::vector<ScoreVector>;

// Scores the query against every seed anchor. Pair representations are
// shared across anchors through one graph, so each (node, query) pair is
// encoded exactly once per query.
ScoreTable score_all_anchors(ScorerModel& m, const Taxonomy& t, const std::vector<Term>& terms,
                             const Term& query);

// Anchor's own path + current scores combined with its parent's forward
// score and its best child's backward score. Root anchors take
// root_parent_score in place of the parent factor; leaf anchors take the
// seed taxonomy's leaf fraction in place of the child factor.
double fitting_score(TermId anchor, const ScoreTable& table, const Taxonomy& t,
                     double root_parent_score);

// The per-mode ranking score; Full is the fitting score.
double mode_score(TermId anchor, const ScoreTable& table, const Taxonomy& t, ScoringMode mode,
                  double root_parent_score);

struct RankedPrediction {
  TermId query = kNoTerm;           // caller-assigned id, informational
  std::vector<TermId> ranking;      // all seed nodes, best first
  std::vector<double> rank_scores;  // aligned with ranking
  TermId chosen = kNoTerm;          // ranking.front()
};

// Ranks every anchor by the mode's score, ties broken by ascending TermId.
RankedPrediction rank_anchors(const ScoreTable& table, const Taxonomy& t, ScoringMode mode,
                              double root_parent_score);

RankedPrediction predict_parent(ScorerModel& m, const Taxonomy& t,
                                const std::vector<Term>& terms, const Term& query,
                                ScoringMode mode);

struct Metrics {
  double acc = 0.0;
  double mrr = 0.0;
  double wup = 0.0;
};

// acc and wup use `chosen`; mrr uses the gold parent's 1-based position in
// `ranking`. Throws DataError when a gold parent is not in the taxonomy.
Metrics evaluate(const std::vector<RankedPrediction>& preds, const std::vector<TermId>& gold,
                 const Taxonomy& t);

}  // namespace taxo
