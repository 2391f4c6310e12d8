#pragma once

#include <unordered_map>
#include <vector>

#include "taxo/coherence.hpp"
#include "taxo/config.hpp"
#include "taxo/pair_encoder.hpp"

namespace taxo {

// Per-(anchor, query) outputs, all in (0, 1); the stopper triple sums to 1.
struct ScoreVector {
  double s_p = 0.0;  // pathfinder: anchor and query share a root path
  double s_f = 0.0;  // stopper forward: the right anchor is deeper
  double s_c = 0.0;  // stopper current: stop at this anchor
  double s_b = 0.0;  // stopper backward: the right anchor is shallower
};

// All trainable state: pair encoder + coherence encoder + heads, plus the
// vocabulary they were built against.
struct ScorerModel {
  RunConfig cfg;
  Vocabulary vocab;
  PairEncoderParams pair;
  CoherenceParams coherence;

  // Builds the vocabulary from the term table (surface + description tokens
  // in id order), then initializes all tensors. One rng stream drives every
  // draw, so (seed, config, corpus) fully determines the starting point.
  void build(const std::vector<Term>& terms, Rng& rng);

  std::vector<nn::Tensor*> tensors();
  void zero_grads();
};

// Memoizes pair representations within one graph. Ego-trees of different
// anchors share nodes, and reusing the graph ref both saves compute and
// accumulates gradients through the shared encoder path.
class PairRepCache {
 public:
  PairRepCache(nn::Graph& g, ScorerModel& m, const Term& query)
      : g_(&g), model_(&m), query_(&query) {}

  nn::Graph::Ref rep(const Term& node_term);
  const std::unordered_map<TermId, nn::Graph::Ref>& all() const { return memo_; }

 private:
  nn::Graph* g_;
  ScorerModel* model_;
  const Term* query_;
  std::unordered_map<TermId, nn::Graph::Ref> memo_;
};

struct AnchorScoreRefs {
  nn::Graph::Ref s_p;      // 1x1
  nn::Graph::Ref stopper;  // 1x3: forward, current, backward
};

// Ego-tree -> assembled input -> coherence encoder -> both heads.
AnchorScoreRefs score_anchor(nn::Graph& g, ScorerModel& m, const Taxonomy& t,
                             const std::vector<Term>& terms, TermId anchor, const Term& query,
                             PairRepCache& cache, TermId exclude = kNoTerm);

ScoreVector read_scores(const nn::Graph& g, const AnchorScoreRefs& refs);

}  // namespace taxo
