#include "taxo/scorer.hpp"

#include "taxo/errors.hpp"

namespace taxo {

void ScorerModel::build(const std::vector<Term>& terms, Rng& rng) {
  cfg.validate();
  vocab = Vocabulary();
  for (const Term& t : terms) {
    vocab.add_text(t.surface);
    vocab.add_text(t.description);
  }
  pair.init(vocab.size(), cfg.d_model, cfg.pair_len, rng);
  coherence.init(cfg, rng);
}

std::vector<nn::Tensor*> ScorerModel::tensors() {
  std::vector<nn::Tensor*> out;
  pair.collect(out);
  coherence.collect(out);
  return out;
}

void ScorerModel::zero_grads() {
  for (nn::Tensor* t : tensors()) t->zero_grad();
}

nn::Graph::Ref PairRepCache::rep(const Term& node_term) {
  auto it = memo_.find(node_term.id);
  if (it != memo_.end()) return it->second;
  PairInput in = build_pair_input(node_term, *query_, model_->vocab, model_->cfg.pair_len);
  nn::Graph::Ref r = encode_pair(*g_, in, model_->pair, model_->cfg.pair_heads);
  memo_.emplace(node_term.id, r);
  return r;
}

AnchorScoreRefs score_anchor(nn::Graph& g, ScorerModel& m, const Taxonomy& t,
                             const std::vector<Term>& terms, TermId anchor, const Term& query,
                             PairRepCache& cache, TermId exclude) {
  EgoTree ego = build_ego_tree(t, terms, anchor, query, m.cfg.child_sample_k, exclude);
  std::unordered_map<TermId, nn::Graph::Ref> reps;
  for (const EgoNode& n : ego.nodes) {
    if (reps.count(n.id)) continue;
    const Term& node_term = n.id == query.id ? query : terms[static_cast<std::size_t>(n.id)];
    reps.emplace(n.id, cache.rep(node_term));
  }
  nn::Graph::Ref input = assemble_input(g, ego, reps, m.coherence, m.cfg);
  CoherenceOut out = coherence_forward(g, input, m.coherence, m.cfg.heads);
  return {pathfinder_score(g, out.path_vec, m.coherence),
          stopper_scores(g, out.level_vec, m.coherence)};
}

ScoreVector read_scores(const nn::Graph& g, const AnchorScoreRefs& refs) {
  ScoreVector s;
  s.s_p = g.scalar(refs.s_p);
  const nn::Mat& st = g.value(refs.stopper);
  s.s_f = st(0, 0);
  s.s_c = st(0, 1);
  s.s_b = st(0, 2);
  return s;
}

}  // namespace taxo
