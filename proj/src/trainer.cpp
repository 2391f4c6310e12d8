#include "taxo/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "taxo/errors.hpp"
#include "taxo/inference.hpp"
#include "taxo/optim.hpp"

namespace taxo {

std::vector<AnchorSample> sample_anchor_set(const Taxonomy& t, TermId q, const RunConfig& cfg,
                                            Rng& rng) {
  if (q == t.root()) throw DataError("sample_anchor_set: the root is not used as a query");
  const TermId p = t.parent(q);

  std::vector<TermId> anc_pool = t.ancestors(p);
  std::vector<TermId> desc_pool;
  for (TermId d : t.descendants(p))
    if (d != q) desc_pool.push_back(d);

  std::vector<bool> taken(static_cast<std::size_t>(t.node_count()), false);
  taken[static_cast<std::size_t>(p)] = true;
  taken[static_cast<std::size_t>(q)] = true;
  for (TermId a : anc_pool) taken[static_cast<std::size_t>(a)] = true;
  for (TermId d : t.descendants(p)) taken[static_cast<std::size_t>(d)] = true;
  std::vector<TermId> other_pool;
  for (TermId n = 0; n < t.node_count(); ++n)
    if (!taken[static_cast<std::size_t>(n)]) other_pool.push_back(n);

  std::vector<AnchorSample> out;
  out.push_back({q, p, 1, StopperLabel::Current});
  for (TermId a : rng.sample(anc_pool, static_cast<std::size_t>(cfg.batch_ancestors_max)))
    out.push_back({q, a, 1, StopperLabel::Forward});
  for (TermId d : rng.sample(desc_pool, static_cast<std::size_t>(cfg.batch_descendants_max)))
    out.push_back({q, d, 1, StopperLabel::Backward});
  const int fill = std::max(cfg.batch_others_min, cfg.batch_size - static_cast<int>(out.size()));
  for (TermId o : rng.sample(other_pool, static_cast<std::size_t>(fill)))
    out.push_back({q, o, 0, StopperLabel::Backward});
  return out;
}

namespace {

constexpr double kProbFloor = 1e-12;

double safe_log(double p) { return std::log(std::max(p, kProbFloor)); }

}  // namespace

double loss_value(const std::vector<ScoreVector>& scores, const std::vector<AnchorSample>& labels,
                  double eta) {
  if (scores.size() != labels.size() || scores.empty())
    throw DataError("loss: scores and labels must align and be non-empty");
  double path = 0.0, stop = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const ScoreVector& s = scores[i];
    path -= labels[i].path_label == 1 ? safe_log(s.s_p) : safe_log(1.0 - s.s_p);
    const double picked = labels[i].stopper_label == StopperLabel::Forward  ? s.s_f
                          : labels[i].stopper_label == StopperLabel::Current ? s.s_c
                                                                             : s.s_b;
    stop -= safe_log(picked);
  }
  const double n = static_cast<double>(scores.size());
  return eta * path / n + (1.0 - eta) * stop / n;
}

nn::Graph::Ref build_loss(nn::Graph& g, const std::vector<AnchorScoreRefs>& refs,
                          const std::vector<AnchorSample>& labels, double eta) {
  if (refs.size() != labels.size() || refs.empty())
    throw DataError("loss: scores and labels must align and be non-empty");
  const nn::Graph::Ref one = g.input(nn::Mat::Ones(1, 1));
  nn::Graph::Ref path_sum = -1, stop_sum = -1;
  auto accumulate = [&g](nn::Graph::Ref& acc, nn::Graph::Ref term) {
    acc = acc < 0 ? term : g.add(acc, term);
  };
  for (std::size_t i = 0; i < refs.size(); ++i) {
    nn::Graph::Ref prob = labels[i].path_label == 1
                              ? refs[i].s_p
                              : g.add(one, g.scale(refs[i].s_p, -1.0));
    accumulate(path_sum, g.scale(g.log_(prob), -1.0));
    nn::Graph::Ref picked = g.pick(refs[i].stopper, 0, static_cast<int>(labels[i].stopper_label));
    accumulate(stop_sum, g.scale(g.log_(picked), -1.0));
  }
  const double n = static_cast<double>(refs.size());
  return g.add(g.scale(path_sum, eta / n), g.scale(stop_sum, (1.0 - eta) / n));
}

double lr_at(long step, long total_steps, const RunConfig& cfg) {
  if (total_steps <= 0) return 0.0;
  const long warm = std::lround(cfg.warmup_frac * static_cast<double>(total_steps));
  if (warm > 0 && step < warm)
    return cfg.lr_peak * static_cast<double>(step) / static_cast<double>(warm);
  if (total_steps == warm) return cfg.lr_peak;
  return cfg.lr_peak * static_cast<double>(total_steps - step) /
         static_cast<double>(total_steps - warm);
}

namespace {

// Scales all gradients down to the given global norm when they exceed it.
void clip_gradients(const std::vector<nn::Tensor*>& tensors, double max_norm) {
  double total = 0.0;
  for (const nn::Tensor* t : tensors) total += t->grad.squaredNorm();
  total = std::sqrt(total);
  if (total <= max_norm || total == 0.0) return;
  const double scale = max_norm / total;
  for (nn::Tensor* t : tensors) t->grad *= scale;
}

double validation_accuracy(ScorerModel& model, const Taxonomy& seed,
                           const std::vector<Term>& seed_terms, const std::vector<Query>& val) {
  int hits = 0;
  for (const Query& q : val) {
    RankedPrediction pred = predict_parent(model, seed, seed_terms, q.term, ScoringMode::Full);
    if (pred.chosen == q.gold_parent) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(val.size());
}

}  // namespace

TrainHistory train(ScorerModel& model, const Taxonomy& seed, const std::vector<Term>& seed_terms,
                   const std::vector<Query>& val, const RunConfig& cfg) {
  TrainHistory history;
  if (cfg.epochs == 0) return history;

  std::vector<TermId> queries;
  for (TermId n = 0; n < seed.node_count(); ++n)
    if (n != seed.root()) queries.push_back(n);
  if (queries.empty()) throw DataError("train: seed taxonomy has no non-root nodes");

  const long total_steps = static_cast<long>(cfg.epochs) * static_cast<long>(queries.size());
  nn::AdamW opt(model.tensors(), cfg.weight_decay);
  Rng rng(static_cast<std::uint64_t>(cfg.rng_seed));

  ScorerModel best;
  double best_acc = -1.0;
  long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng erng = rng.fork(static_cast<std::uint64_t>(epoch));
    std::vector<TermId> order = queries;
    erng.shuffle(order);

    double loss_sum = 0.0;
    for (TermId q : order) {
      std::vector<AnchorSample> samples = sample_anchor_set(seed, q, cfg, erng);
      nn::Graph g;
      PairRepCache cache(g, model, seed_terms[static_cast<std::size_t>(q)]);
      std::vector<AnchorScoreRefs> refs;
      refs.reserve(samples.size());
      for (const AnchorSample& s : samples)
        refs.push_back(score_anchor(g, model, seed, seed_terms,
                                    s.anchor, seed_terms[static_cast<std::size_t>(q)], cache,
                                    /*exclude=*/q));
      nn::Graph::Ref loss = build_loss(g, refs, samples, cfg.eta);
      const double value = g.scalar(loss);
      if (!std::isfinite(value))
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                           ", query " + std::to_string(q));
      loss_sum += value;
      g.backward(loss);
      if (cfg.grad_clip > 0.0) clip_gradients(model.tensors(), cfg.grad_clip);
      opt.step(lr_at(step, total_steps, cfg));
      ++step;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(order.size());
    if (!val.empty()) {
      stats.val_acc = validation_accuracy(model, seed, seed_terms, val);
      if (stats.val_acc > best_acc) {
        best_acc = stats.val_acc;
        best = model;
        history.best_epoch = epoch;
        history.best_val_acc = stats.val_acc;
      }
    }
    history.epochs.push_back(stats);
  }

  if (!val.empty()) model = best;
  return history;
}

}  // namespace taxo
