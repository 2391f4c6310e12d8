#include "taxo/inference.hpp"

#include <algorithm>
#include <numeric>

#include "taxo/errors.hpp"

namespace taxo {

ScoreTable score_all_anchors(ScorerModel& m, const Taxonomy& t, const std::vector<Term>& terms,
                             const Term& query) {
  Term q = query;
  q.id = static_cast<TermId>(t.node_count());  // fresh id outside the seed range
  nn::Graph g;
  PairRepCache cache(g, m, q);
  ScoreTable table(static_cast<std::size_t>(t.node_count()));
  for (TermId a = 0; a < t.node_count(); ++a) {
    try {
      AnchorScoreRefs refs = score_anchor(g, m, t, terms, a, q, cache);
      table[static_cast<std::size_t>(a)] = read_scores(g, refs);
    } catch (const DataError& e) {
      throw DataError("scoring anchor " + std::to_string(a) + ": " + e.what());
    }
  }
  return table;
}

namespace {

// Best child = highest pathfinder score, ties to the smaller id.
TermId best_child(TermId anchor, const ScoreTable& table, const Taxonomy& t) {
  TermId best = kNoTerm;
  double best_sp = -1.0;
  for (TermId c : t.children(anchor)) {
    const double sp = table[static_cast<std::size_t>(c)].s_p;
    if (sp > best_sp || (sp == best_sp && c < best)) {
      best_sp = sp;
      best = c;
    }
  }
  return best;
}

}  // namespace

double mode_score(TermId anchor, const ScoreTable& table, const Taxonomy& t, ScoringMode mode,
                  double root_parent_score) {
  const ScoreVector& own = table[static_cast<std::size_t>(anchor)];
  if (mode == ScoringMode::CurrentOnly) return own.s_c;
  if (mode == ScoringMode::PathfinderCurrent) return own.s_p * own.s_c;

  const double parent_factor =
      anchor == t.root() ? root_parent_score
                         : table[static_cast<std::size_t>(t.parent(anchor))].s_f;
  const double child_factor =
      t.is_leaf(anchor) ? t.leaf_fraction()
                        : table[static_cast<std::size_t>(best_child(anchor, table, t))].s_b;
  const double stopper_part = parent_factor * own.s_c * child_factor;
  return mode == ScoringMode::StopperOnly ? stopper_part : own.s_p * stopper_part;
}

double fitting_score(TermId anchor, const ScoreTable& table, const Taxonomy& t,
                     double root_parent_score) {
  return mode_score(anchor, table, t, ScoringMode::Full, root_parent_score);
}

RankedPrediction rank_anchors(const ScoreTable& table, const Taxonomy& t, ScoringMode mode,
                              double root_parent_score) {
  const int n = t.node_count();
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (TermId a = 0; a < n; ++a)
    scores[static_cast<std::size_t>(a)] = mode_score(a, table, t, mode, root_parent_score);
  RankedPrediction pred;
  pred.ranking.resize(static_cast<std::size_t>(n));
  std::iota(pred.ranking.begin(), pred.ranking.end(), 0);
  std::sort(pred.ranking.begin(), pred.ranking.end(), [&](TermId x, TermId y) {
    const double sx = scores[static_cast<std::size_t>(x)], sy = scores[static_cast<std::size_t>(y)];
    return sx != sy ? sx > sy : x < y;
  });
  pred.rank_scores.reserve(pred.ranking.size());
  for (TermId a : pred.ranking) pred.rank_scores.push_back(scores[static_cast<std::size_t>(a)]);
  pred.chosen = pred.ranking.front();
  return pred;
}

RankedPrediction predict_parent(ScorerModel& m, const Taxonomy& t,
                                const std::vector<Term>& terms, const Term& query,
                                ScoringMode mode) {
  ScoreTable table = score_all_anchors(m, t, terms, query);
  RankedPrediction pred = rank_anchors(table, t, mode, m.cfg.root_parent_score);
  pred.query = query.id;
  return pred;
}

Metrics evaluate(const std::vector<RankedPrediction>& preds, const std::vector<TermId>& gold,
                 const Taxonomy& t) {
  if (preds.size() != gold.size())
    throw DataError("evaluate: prediction and gold counts differ");
  if (preds.empty()) throw DataError("evaluate: empty prediction set");
  Metrics m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const TermId g = gold[i];
    if (!t.contains(g))
      throw DataError("evaluate: gold parent " + std::to_string(g) + " not in taxonomy");
    const RankedPrediction& p = preds[i];
    if (p.chosen == g) m.acc += 1.0;
    auto pos = std::find(p.ranking.begin(), p.ranking.end(), g);
    if (pos == p.ranking.end())
      throw DataError("evaluate: gold parent " + std::to_string(g) + " missing from ranking");
    m.mrr += 1.0 / static_cast<double>(pos - p.ranking.begin() + 1);
    const TermId l = t.lca(p.chosen, g);
    m.wup += 2.0 * t.depth(l) / static_cast<double>(t.depth(p.chosen) + t.depth(g));
  }
  const double k = static_cast<double>(preds.size());
  m.acc /= k;
  m.mrr /= k;
  m.wup /= k;
  return m;
}

}  // namespace taxo
