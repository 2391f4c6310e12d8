// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "taxo/checkpoint.hpp"
#include "taxo/cli.hpp"
#include "taxo/descgen.hpp"
#include "taxo/inference.hpp"
#include "taxo/trainer.hpp"

using namespace taxo;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Taxonomy random_tree(int n, Rng& rng) {
  std::vector<Edge> edges;
  for (TermId i = 1; i < n; ++i) edges.push_back({rng.uniform_int(i), i});
  return Taxonomy::from_edges(n, edges, 0);
}

// ---------------------------------------------------------------------------
// 1. Fitting-score arithmetic on the two worked examples.

void criterion_fitting_score(Check& c) {
  // chain root -> food -> starches -> rice -> {white rice, brown rice}
  std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 5}};
  Taxonomy t = Taxonomy::from_edges(6, edges, 0);

  struct Row {
    double s_p, s_f_parent, s_c, s_b_child, expect;
  };
  const std::vector<Row> rows{
      {0.9997, 0.9755, 0.4599, 0.9995, 0.4483},
      {0.9993, 0.9984, 0.3169, 0.9988, 0.3158},
  };
  for (const Row& row : rows) {
    ScoreTable table(6);
    table[3] = {row.s_p, 0.2, row.s_c, 0.2};
    table[2] = {0.5, row.s_f_parent, 0.2, 0.2};
    table[4] = {0.9, 0.1, 0.1, row.s_b_child};  // the higher-s_p child
    table[5] = {0.2, 0.1, 0.1, 0.5};
    const double f = fitting_score(3, table, t, 1e-4);
    c.expect(std::abs(f - row.expect) <= 5e-4,
             "expected " + fmt(row.expect) + ", got " + fmt(f));
  }
}

// ---------------------------------------------------------------------------
// 2. Anchor labels vs. brute-force set classification.

void criterion_label_oracle(Check& c) {
  RunConfig cfg;
  cfg.heads = 1;
  cfg.pair_heads = 1;
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.uniform_int(39);  // up to 40 nodes
    Taxonomy t = random_tree(n, rng);
    for (TermId q = 0; q < n; ++q) {
      if (q == t.root()) continue;
      auto samples = sample_anchor_set(t, q, cfg, rng);
      const TermId p = t.parent(q);
      const auto anc = t.ancestors(p);
      const auto desc = t.descendants(p);
      std::set<TermId> anc_set(anc.begin(), anc.end());
      std::set<TermId> desc_set(desc.begin(), desc.end());
      std::set<TermId> seen;
      for (const AnchorSample& s : samples) {
        ++checked;
        if (!seen.insert(s.anchor).second) c.fail("anchor sampled twice");
        if (s.anchor == q) c.fail("query sampled as its own anchor");
        int path;
        StopperLabel stop;
        if (s.anchor == p) {
          path = 1;
          stop = StopperLabel::Current;
        } else if (anc_set.count(s.anchor)) {
          path = 1;
          stop = StopperLabel::Forward;
        } else if (desc_set.count(s.anchor)) {
          path = 1;
          stop = StopperLabel::Backward;
        } else {
          path = 0;
          stop = StopperLabel::Backward;
        }
        if (s.path_label != path || s.stopper_label != stop)
          c.fail("label mismatch at anchor " + std::to_string(s.anchor));
      }
      if (!seen.count(p)) c.fail("true parent missing from the anchor set");
    }
  }
  c.expect(checked > 0, "no samples checked");
  if (c.ok) c.detail = std::to_string(checked) + " labels checked";
}

// ---------------------------------------------------------------------------
// 3. Full-loss gradients vs. central differences on a 5-node fixture.

void criterion_gradients(Check& c) {
  // 0 -> {1, 2}, 1 -> {3, 4}; query 3 yields all four label classes.
  std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 3}, {1, 4}};
  Taxonomy t = Taxonomy::from_edges(5, edges, 0);
  std::vector<Term> terms(5);
  const char* surfaces[] = {"ware", "kit ware", "bin ware", "kit piece", "kit unit"};
  for (TermId i = 0; i < 5; ++i) {
    terms[i] = {i, surfaces[i], ""};
    terms[i].description = terms[i].surface;
  }

  ScorerModel model;
  model.cfg.d_model = 8;
  model.cfg.layers = 2;
  model.cfg.heads = 2;
  model.cfg.pair_heads = 2;
  model.cfg.head_hidden = 8;
  model.cfg.max_depth = 6;
  model.cfg.pair_len = 10;
  Rng init(77);
  model.build(terms, init);

  const TermId query = 3;
  RunConfig cfg = model.cfg;
  Rng srng(7);
  std::vector<AnchorSample> samples = sample_anchor_set(t, query, cfg, srng);
  bool has_other = false;
  for (const auto& s : samples) has_other |= s.path_label == 0;
  c.expect(samples.size() == 4 && has_other, "fixture must produce all four label classes");

  auto loss_of = [&](nn::Graph& g) {
    PairRepCache cache(g, model, terms[query]);
    std::vector<AnchorScoreRefs> refs;
    for (const AnchorSample& s : samples)
      refs.push_back(score_anchor(g, model, t, terms, s.anchor, terms[query], cache, query));
    return build_loss(g, refs, samples, 0.7);
  };

  model.zero_grads();
  {
    nn::Graph g;
    g.backward(loss_of(g));
  }

  const double h = 1e-5;
  double worst = 0.0;
  std::string worst_name;
  long probes = 0;
  for (nn::Tensor* tensor : model.tensors()) {
    for (int i = 0; i < static_cast<int>(tensor->size()); ++i) {
      double* slot = tensor->value.data() + i;
      const double saved = *slot;
      *slot = saved + h;
      nn::Graph gu;
      const double up = gu.scalar(loss_of(gu));
      *slot = saved - h;
      nn::Graph gd;
      const double down = gd.scalar(loss_of(gd));
      *slot = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = tensor->grad.data()[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      ++probes;
      if (rel > worst) {
        worst = rel;
        worst_name = tensor->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  c.expect(worst <= 1e-4, "worst relative error " + fmt(worst) + " at " + worst_name);
  if (c.ok)
    c.detail = std::to_string(probes) + " entries probed, worst rel err " + fmt(worst) + " (" +
               worst_name + ")";
}

// ---------------------------------------------------------------------------
// 4. Segmentation DP vs. exhaustive enumeration.

void criterion_segmentation(Check& c) {
  Rng rng(404);
  const std::vector<std::string> pool{"ice", "hot",  "tea", "cup",  "red", "dry",
                                      "sea", "salt", "oat", "milk", "rye", "jam"};
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + rng.uniform_int(10);
    std::vector<std::string> tokens;
    for (int i = 0; i < n; ++i)
      tokens.push_back(pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))]);
    Lexicon lex;
    const int phrases = rng.uniform_int(7);
    for (int p = 0; p < phrases; ++p) {
      const int start = rng.uniform_int(n);
      const int len = 1 + rng.uniform_int(n - start);
      std::string phrase;
      for (int i = start; i < start + len; ++i)
        phrase += (phrase.empty() ? "" : " ") + tokens[static_cast<std::size_t>(i)];
      lex.add(phrase, {"gloss"});
    }

    // Exhaustive search over all 2^(n-1) segmentations.
    int best = -1;
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
      int total = 0, start = 0;
      for (int i = 0; i < n; ++i) {
        const bool cut = i == n - 1 || (mask & (1u << i));
        if (cut) {
          total += span_score(tokens, {start, i + 1}, lex);
          start = i + 1;
        }
      }
      best = std::max(best, total);
    }

    auto spans = best_segmentation(tokens, lex);
    int cursor = 0;
    for (const Span& s : spans) {
      if (s.begin != cursor || s.end <= s.begin) c.fail("spans do not tile the input");
      cursor = s.end;
    }
    if (cursor != n) c.fail("spans do not cover the input");
    if (segmentation_score(tokens, spans, lex) != best) ++mismatches;
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " of 500 segmentations suboptimal");
  if (c.ok) c.detail = "500 sequences, zero mismatches";
}

// ---------------------------------------------------------------------------
// 5. Metric arithmetic on constructed prediction sets.

void criterion_metrics(Check& c) {
  // Each fixture is built directly from known ranks/depths, so the expected
  // values come from integer arithmetic rather than the evaluate() path.
  struct Expected {
    double acc, mrr, wup;
  };

  int fixtures = 0;
  auto run_fixture = [&](const Taxonomy& t, const std::vector<RankedPrediction>& preds,
                         const std::vector<TermId>& gold, const Expected& e) {
    ++fixtures;
    Metrics m = evaluate(preds, gold, t);
    if (std::abs(m.acc - e.acc) > 1e-9) c.fail("acc mismatch in fixture " + std::to_string(fixtures));
    if (std::abs(m.mrr - e.mrr) > 1e-9) c.fail("mrr mismatch in fixture " + std::to_string(fixtures));
    if (std::abs(m.wup - e.wup) > 1e-9) c.fail("wup mismatch in fixture " + std::to_string(fixtures));
  };

  auto ranking_with_gold_at = [](int n, TermId gold, int rank) {
    std::vector<TermId> r;
    for (TermId i = 0; i < n; ++i)
      if (i != gold) r.push_back(i);
    r.insert(r.begin() + (rank - 1), gold);
    return r;
  };

  // Fixture: identity prediction, all ones.
  {
    std::vector<Edge> edges{{0, 1}, {1, 2}, {1, 3}};
    Taxonomy t = Taxonomy::from_edges(4, edges, 0);
    RankedPrediction p;
    p.ranking = ranking_with_gold_at(4, 2, 1);
    p.chosen = 2;
    run_fixture(t, {p}, {2}, {1.0, 1.0, 1.0});
  }

  // Fixture: siblings at depth 3, LCA depth 2 -> Wu&P 2/3.
  {
    std::vector<Edge> edges{{0, 1}, {1, 2}, {1, 3}};
    Taxonomy t = Taxonomy::from_edges(4, edges, 0);
    RankedPrediction p;
    p.ranking = {3, 2, 1, 0};  // gold 2 sits at rank 2
    p.chosen = 3;              // the sibling of the gold parent
    run_fixture(t, {p}, {2}, {0.0, 0.5, 2.0 / 3.0});
  }

  // Fixture: gold ranks 1, 2, 4 -> MRR (1 + 1/2 + 1/4)/3.
  {
    Taxonomy t = Taxonomy::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 0);
    std::vector<RankedPrediction> preds;
    std::vector<TermId> gold{1, 1, 1};
    for (int rank : {1, 2, 4}) {
      RankedPrediction p;
      p.ranking = ranking_with_gold_at(5, 1, rank);
      p.chosen = rank == 1 ? 1 : p.ranking.front();
      preds.push_back(p);
    }
    // All misses picked node 0 or 2 (depth 1 or 2); compute Wu&P directly:
    // gold depth 2. rank2 -> chosen 0 (depth 1, lca 0 depth 1): 2*1/3.
    // rank4 -> chosen 0 as well.
    const RankedPrediction& p2 = preds[1];
    const RankedPrediction& p3 = preds[2];
    if (p2.chosen != 0 || p3.chosen != 0) c.fail("mrr fixture construction broke");
    const double wup = (1.0 + 2.0 / 3.0 + 2.0 / 3.0) / 3.0;
    run_fixture(t, preds, gold, {1.0 / 3.0, (1.0 + 0.5 + 0.25) / 3.0, wup});
  }

  // 47 more fixtures on chains: depths and LCAs are known by construction.
  Rng rng(555);
  for (int fx = 0; fx < 47; ++fx) {
    const int len = 4 + rng.uniform_int(5);  // chain 0 -> 1 -> ... -> len-1
    std::vector<Edge> edges;
    for (TermId i = 1; i < len; ++i) edges.push_back({i - 1, i});
    Taxonomy t = Taxonomy::from_edges(len, edges, 0);

    const int k = 1 + rng.uniform_int(4);
    std::vector<RankedPrediction> preds;
    std::vector<TermId> gold;
    long hits = 0;
    double mrr_sum = 0.0, wup_sum = 0.0;
    for (int i = 0; i < k; ++i) {
      const TermId g = rng.uniform_int(len);
      const int rank = 1 + rng.uniform_int(len);
      RankedPrediction p;
      p.ranking = ranking_with_gold_at(len, g, rank);
      p.chosen = p.ranking.front();
      preds.push_back(p);
      gold.push_back(g);
      // On a chain, depth(i) = i + 1 and lca(a, b) = min(a, b).
      const TermId ch = preds.back().chosen;
      hits += ch == g ? 1 : 0;
      mrr_sum += 1.0 / rank;
      wup_sum += 2.0 * (std::min(ch, g) + 1) / static_cast<double>((ch + 1) + (g + 1));
    }
    run_fixture(t, preds, gold,
                {static_cast<double>(hits) / k, mrr_sum / k, wup_sum / k});
  }

  c.expect(fixtures == 50, "expected 50 fixtures, ran " + std::to_string(fixtures));
  if (c.ok) c.detail = "50 fixtures";
}

// ---------------------------------------------------------------------------
// 6. Ranking vs. brute-force mode formulas on random score tables.

void criterion_inference_oracle(Check& c) {
  Rng rng(606);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + rng.uniform_int(49);  // up to 50 nodes
    Taxonomy t = random_tree(n, rng);
    ScoreTable table(static_cast<std::size_t>(n));
    for (auto& s : table) {
      s.s_p = rng.uniform(0.001, 0.999);
      const double f = rng.uniform(0.001, 0.997);
      const double cur = rng.uniform(0.001, 0.998 - f);
      s = {s.s_p, f, cur, 1.0 - f - cur};
    }
    const double root_small = 1e-4;
    for (ScoringMode mode : {ScoringMode::Full, ScoringMode::StopperOnly,
                             ScoringMode::PathfinderCurrent, ScoringMode::CurrentOnly}) {
      RankedPrediction pred = rank_anchors(table, t, mode, root_small);
      for (TermId a = 0; a < n; ++a) {
        // Direct evaluation of the mode formula.
        const ScoreVector& own = table[static_cast<std::size_t>(a)];
        double expect;
        if (mode == ScoringMode::CurrentOnly) {
          expect = own.s_c;
        } else if (mode == ScoringMode::PathfinderCurrent) {
          expect = own.s_p * own.s_c;
        } else {
          double pf = a == t.root() ? root_small : table[static_cast<std::size_t>(t.parent(a))].s_f;
          double cf;
          if (t.children(a).empty()) {
            cf = t.leaf_fraction();
          } else {
            TermId best = t.children(a).front();
            for (TermId ch : t.children(a))
              if (table[static_cast<std::size_t>(ch)].s_p > table[static_cast<std::size_t>(best)].s_p ||
                  (table[static_cast<std::size_t>(ch)].s_p == table[static_cast<std::size_t>(best)].s_p && ch < best))
                best = ch;
            cf = table[static_cast<std::size_t>(best)].s_b;
          }
          expect = pf * own.s_c * cf;
          if (mode == ScoringMode::Full) expect *= own.s_p;
        }
        ++compared;
        if (mode_score(a, table, t, mode, root_small) != expect)
          c.fail("mode score mismatch at anchor " + std::to_string(a));
      }
      // The argmax with id tie-break must match the top of the ranking.
      TermId best = 0;
      for (TermId a = 1; a < n; ++a)
        if (mode_score(a, table, t, mode, root_small) > mode_score(best, table, t, mode, root_small))
          best = a;
      if (pred.chosen != best) c.fail("argmax mismatch");
    }
  }
  if (c.ok) c.detail = std::to_string(compared) + " anchor scores compared";
}

// ---------------------------------------------------------------------------
// 7. Synthetic end-to-end training bar.

struct SyntheticData {
  Corpus corpus;
  Taxonomy tree;
};

SyntheticData synthetic_taxonomy() {
  // 3 levels, 60 nodes: 1 root + 8 groups + 51 leaves. Leaf surfaces share
  // their group's token, so parent choice is learnable from surfaces.
  SyntheticData data;
  const std::vector<std::string> groups{"alpha", "bravo", "carbon", "delta",
                                        "ember", "fallow", "garnet", "harbor"};
  auto add_term = [&](const std::string& surface) {
    TermId id = static_cast<TermId>(data.corpus.terms.size());
    data.corpus.terms.push_back({id, surface, surface});
    return id;
  };
  const TermId root = add_term("catalog");
  data.corpus.root = root;
  int leaves_left = 51;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const TermId g = add_term(groups[gi] + " ware");
    data.corpus.edges.push_back({root, g});
    const int quota = leaves_left / static_cast<int>(groups.size() - gi);
    for (int j = 0; j < quota; ++j) {
      const TermId leaf = add_term(groups[gi] + " piece" + std::to_string(j + 1));
      data.corpus.edges.push_back({g, leaf});
    }
    leaves_left -= quota;
  }
  data.tree = prune_to_spanning_tree(static_cast<int>(data.corpus.terms.size()),
                                     data.corpus.edges, root);
  return data;
}

void criterion_end_to_end(Check& c) {
  SyntheticData data = synthetic_taxonomy();
  c.expect(data.tree.node_count() == 60, "synthetic taxonomy must have 60 nodes");

  RunConfig cfg;
  cfg.d_model = 16;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.pair_heads = 2;
  cfg.head_hidden = 16;
  cfg.max_depth = 6;
  cfg.pair_len = 8;
  cfg.epochs = 50;
  cfg.lr_peak = 1e-3;
  cfg.eta = 0.5;
  cfg.rng_seed = 9001;
  cfg.test_ratio = 10.0 / 60.0;
  cfg.val_count = 10;

  Rng master(static_cast<std::uint64_t>(cfg.rng_seed));
  Rng split_rng = master.fork(1);
  DatasetSplit split = split_dataset(data.tree, data.corpus.terms, cfg.test_ratio, cfg.val_count,
                                     split_rng);
  c.expect(split.val.size() == 10, "expected 10 held-out leaves");
  c.expect(split.test.empty(), "all held-out leaves belong to the validation set");

  ScorerModel model;
  model.cfg = cfg;
  Rng init = master.fork(2);
  model.build(split.seed_terms, init);
  TrainHistory history = train(model, split.seed, split.seed_terms, split.val, cfg);
  c.expect(static_cast<int>(history.epochs.size()) == cfg.epochs, "training must run 50 epochs");

  auto accuracy_under = [&](ScoringMode mode) {
    int hits = 0;
    for (const Query& q : split.val) {
      RankedPrediction pred = predict_parent(model, split.seed, split.seed_terms, q.term, mode);
      hits += pred.chosen == q.gold_parent ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(split.val.size());
  };

  const double full_acc = accuracy_under(ScoringMode::Full);
  const double current_acc = accuracy_under(ScoringMode::CurrentOnly);
  c.expect(full_acc >= 0.8, "full-mode accuracy " + fmt(full_acc) + " below 0.8");
  c.expect(full_acc >= current_acc, "full " + fmt(full_acc) + " below current-only " +
                                        fmt(current_acc));
  if (c.ok)
    c.detail = "full accuracy " + fmt(full_acc) + ", current-only " + fmt(current_acc) +
               ", best epoch " + std::to_string(history.best_epoch);
}

// ---------------------------------------------------------------------------
// 8. Determinism of a full run and checkpoint persistence.

void criterion_determinism(Check& c) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "taxo_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  std::ostringstream tax;
  SyntheticData data = synthetic_taxonomy();
  for (const Edge& e : data.tree.edges())
    tax << data.corpus.terms[static_cast<std::size_t>(e.parent)].surface << '\t'
        << data.corpus.terms[static_cast<std::size_t>(e.child)].surface << '\n';
  std::ofstream(p("tax.tsv")) << tax.str();
  std::ofstream(p("run.cfg")) << "d_model = 8\nlayers = 1\nheads = 2\npair_heads = 2\n"
                                 "head_hidden = 8\nmax_depth = 6\npair_len = 8\nepochs = 3\n"
                                 "lr_peak = 0.001\ntest_ratio = 0.1\nval_count = 3\nrng_seed = 11\n";
  std::ofstream(p("queries.tsv")) << "alpha piece99\nbravo piece99\ngarnet piece99\n";

  auto read = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  for (const char* tag : {"a", "b"}) {
    const std::string ckpt = p(std::string("model_") + tag + ".ckpt");
    int rc = cli::run({"taxo", "train", "--taxonomy", p("tax.tsv"), "--config", p("run.cfg"),
                       "--out", ckpt});
    if (rc != 0) c.fail("train run " + std::string(tag) + " exited " + std::to_string(rc));
    rc = cli::run({"taxo", "expand", "--checkpoint", ckpt, "--queries", p("queries.tsv"),
                   "--out", p(std::string("pred_") + tag + ".tsv")});
    if (rc != 0) c.fail("expand run " + std::string(tag) + " exited " + std::to_string(rc));
  }
  c.expect(read(p("pred_a.tsv")) == read(p("pred_b.tsv")),
           "prediction files differ between identical runs");
  c.expect(read(p("pred_a.tsv.ranks.tsv")) == read(p("pred_b.tsv.ranks.tsv")),
           "ranking files differ between identical runs");
  c.expect(!read(p("pred_a.tsv")).empty(), "empty prediction file");

  // Checkpoint round trip preserves scores exactly.
  LoadedCheckpoint first = load_checkpoint(p("model_a.ckpt"));
  Term probe{kNoTerm, "alpha piece99", "alpha piece99"};
  ScoreTable before = score_all_anchors(first.model, first.seed, first.seed_terms, probe);
  save_checkpoint(p("resaved.ckpt"), first.model, first.seed, first.seed_terms);
  LoadedCheckpoint second = load_checkpoint(p("resaved.ckpt"));
  ScoreTable after = score_all_anchors(second.model, second.seed, second.seed_terms, probe);
  for (std::size_t i = 0; i < before.size(); ++i)
    if (before[i].s_p != after[i].s_p || before[i].s_f != after[i].s_f ||
        before[i].s_c != after[i].s_c || before[i].s_b != after[i].s_b)
      c.fail("scores changed across checkpoint round trip");

  fs::remove_all(dir);
  if (c.ok) c.detail = "byte-identical predictions; scores exact across reload";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Check&)> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "fitting-score arithmetic", 10.0, criterion_fitting_score},
      {2, "anchor label oracle", 10.0, criterion_label_oracle},
      {3, "full-loss gradient suite", 60.0, criterion_gradients},
      {4, "segmentation DP optimality", 10.0, criterion_segmentation},
      {5, "metric correctness", 10.0, criterion_metrics},
      {6, "inference mode oracle", 10.0, criterion_inference_oracle},
      {7, "synthetic end-to-end training", 300.0, criterion_end_to_end},
      {8, "determinism and persistence", 300.0, criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.fn(check);
    } catch (const std::exception& e) {
      check.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.budget_s) check.fail("exceeded time budget: " + fmt(secs) + "s");
    std::printf("criterion %d (%s): %s%s%s [%.1fs]\n", cr.id, cr.name,
                check.ok ? "PASS" : "FAIL", check.detail.empty() ? "" : " - ",
                check.detail.c_str(), secs);
    failures += check.ok ? 0 : 1;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
