#include "taxo/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include "taxo/checkpoint.hpp"
#include "taxo/descgen.hpp"
#include "taxo/errors.hpp"
#include "taxo/inference.hpp"
#include "taxo/trainer.hpp"

namespace taxo::cli {

namespace {

// Fork tags for the substreams hanging off rng_seed. Split uses the same
// tag in `train` and `split`, so both commands agree on the held-out set.
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kInitStream = 202;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct LoadedData {
  Corpus corpus;
  Taxonomy tree;
};

LoadedData load_corpus(const std::string& taxonomy_path, const std::string& glossary_path) {
  LoadedData data;
  data.corpus = load_taxonomy_tsv(taxonomy_path);
  if (!glossary_path.empty()) apply_glossary_tsv(glossary_path, data.corpus.terms);
  data.tree = prune_to_spanning_tree(static_cast<int>(data.corpus.terms.size()),
                                     data.corpus.edges, data.corpus.root);
  return data;
}

Lexicon load_lexicon_opt(const std::string& path) {
  return path.empty() ? Lexicon() : Lexicon::load_jsonl(path);
}

TokenEmbeddingTable load_embeddings_opt(const std::string& path) {
  return path.empty() ? TokenEmbeddingTable(16) : TokenEmbeddingTable::load_text(path);
}

void fill_descriptions(std::vector<Term>& terms, const std::string& root_surface,
                       const Lexicon& lex, const TokenEmbeddingTable& emb) {
  for (Term& t : terms)
    if (t.description.empty()) t.description = describe(t.surface, root_surface, lex, emb);
}

void write_queries_tsv(const std::string& path, const std::vector<Query>& queries,
                       const std::vector<Term>& seed_terms) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const Query& q : queries)
    out << q.term.surface << '\t' << seed_terms[static_cast<std::size_t>(q.gold_parent)].surface
        << '\n';
}

struct QueryText {
  std::string surface;
  std::string description;  // may be empty until generated
};

std::vector<QueryText> load_queries_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open queries file: " + path);
  std::vector<QueryText> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    QueryText q;
    q.surface = tab == std::string::npos ? line : line.substr(0, tab);
    if (tab != std::string::npos) q.description = line.substr(tab + 1);
    if (q.surface.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": empty query surface");
    out.push_back(std::move(q));
  }
  if (out.empty()) throw DataError(path + ": no queries");
  return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string taxonomy, glossary, lexicon, embeddings, config, out;
};

int cmd_train(const TrainArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig() : load_run(a.config);
  LoadedData data = load_corpus(a.taxonomy, a.glossary);
  Lexicon lex = load_lexicon_opt(a.lexicon);
  TokenEmbeddingTable emb = load_embeddings_opt(a.embeddings);
  const std::string root_surface = data.corpus.terms[static_cast<std::size_t>(data.corpus.root)].surface;
  fill_descriptions(data.corpus.terms, root_surface, lex, emb);

  Rng master(static_cast<std::uint64_t>(cfg.rng_seed));
  Rng split_rng = master.fork(kSplitStream);
  DatasetSplit split = split_dataset(data.tree, data.corpus.terms, cfg.test_ratio, cfg.val_count,
                                     split_rng);

  ScorerModel model;
  model.cfg = cfg;
  Rng init_rng = master.fork(kInitStream);
  model.build(split.seed_terms, init_rng);

  TrainHistory history = train(model, split.seed, split.seed_terms, split.val, cfg);

  save_checkpoint(a.out, model, split.seed, split.seed_terms);
  save_run(a.out + ".config", cfg);
  write_queries_tsv(a.out + ".val.tsv", split.val, split.seed_terms);
  write_queries_tsv(a.out + ".test.tsv", split.test, split.seed_terms);
  {
    std::ofstream hist(a.out + ".history.csv");
    if (!hist) throw DataError("cannot write " + a.out + ".history.csv");
    hist << "epoch,loss,val_acc\n";
    for (const EpochStats& e : history.epochs)
      hist << e.epoch << ',' << fmt(e.mean_loss) << ',' << fmt(e.val_acc) << '\n';
  }

  std::cout << "trained " << history.epochs.size() << " epochs on "
            << split.seed.node_count() << " seed nodes";
  if (history.best_epoch > 0)
    std::cout << "; best epoch " << history.best_epoch << " (val acc "
              << fmt(history.best_val_acc) << ")";
  std::cout << "\ncheckpoint: " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
  std::string taxonomy, glossary, config, out_dir;
};

int cmd_split(const SplitArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig() : load_run(a.config);
  LoadedData data = load_corpus(a.taxonomy, a.glossary);
  Rng master(static_cast<std::uint64_t>(cfg.rng_seed));
  Rng split_rng = master.fork(kSplitStream);
  DatasetSplit split = split_dataset(data.tree, data.corpus.terms, cfg.test_ratio, cfg.val_count,
                                     split_rng);
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  save_taxonomy_tsv((dir / "seed.tsv").string(), split.seed, split.seed_terms);
  write_queries_tsv((dir / "val.tsv").string(), split.val, split.seed_terms);
  write_queries_tsv((dir / "test.tsv").string(), split.test, split.seed_terms);
  save_run((dir / "resolved.config").string(), cfg);
  std::cout << "seed " << split.seed.node_count() << " nodes, val " << split.val.size()
            << ", test " << split.test.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// expand

struct ExpandArgs {
  std::string checkpoint, queries, lexicon, embeddings, out, out_taxonomy;
  std::string mode = "full";
};

int cmd_expand(const ExpandArgs& a) {
  const ScoringMode mode = parse_scoring_mode(a.mode);
  LoadedCheckpoint ckpt = load_checkpoint(a.checkpoint);
  Lexicon lex = load_lexicon_opt(a.lexicon);
  TokenEmbeddingTable emb = load_embeddings_opt(a.embeddings);
  const std::string root_surface =
      ckpt.seed_terms[static_cast<std::size_t>(ckpt.seed.root())].surface;

  std::vector<QueryText> queries = load_queries_tsv(a.queries);
  std::ofstream out(a.out);
  if (!out) throw DataError("cannot write " + a.out);
  std::ofstream ranks(a.out + ".ranks.tsv");
  if (!ranks) throw DataError("cannot write " + a.out + ".ranks.tsv");

  ExpandedTaxonomy expanded(ckpt.seed);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Term term;
    term.id = kNoTerm;
    term.surface = queries[i].surface;
    term.description = queries[i].description.empty()
                           ? describe(queries[i].surface, root_surface, lex, emb)
                           : queries[i].description;
    RankedPrediction pred = predict_parent(ckpt.model, ckpt.seed, ckpt.seed_terms, term, mode);
    const std::string& parent_surface =
        ckpt.seed_terms[static_cast<std::size_t>(pred.chosen)].surface;
    out << term.surface << '\t' << parent_surface << '\t' << fmt(pred.rank_scores.front())
        << '\n';
    ranks << term.surface;
    for (TermId r : pred.ranking)
      ranks << '\t' << ckpt.seed_terms[static_cast<std::size_t>(r)].surface;
    ranks << '\n';
    expanded.attach(pred.chosen, static_cast<TermId>(ckpt.seed.node_count()) +
                                     static_cast<TermId>(i));
  }
  save_run(a.out + ".config", ckpt.model.cfg);

  if (!a.out_taxonomy.empty()) {
    std::ofstream merged(a.out_taxonomy);
    if (!merged) throw DataError("cannot write " + a.out_taxonomy);
    for (const Edge& e : ckpt.seed.edges())
      merged << ckpt.seed_terms[static_cast<std::size_t>(e.parent)].surface << '\t'
             << ckpt.seed_terms[static_cast<std::size_t>(e.child)].surface << '\n';
    for (const Edge& e : expanded.additions()) {
      const std::size_t qi =
          static_cast<std::size_t>(e.child - static_cast<TermId>(ckpt.seed.node_count()));
      merged << ckpt.seed_terms[static_cast<std::size_t>(e.parent)].surface << '\t'
             << queries[qi].surface << '\n';
    }
  }
  std::cout << "expanded " << queries.size() << " queries (" << scoring_mode_name(mode)
            << " mode) -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string pred, gold, taxonomy, ranks;
};

int cmd_eval(const EvalArgs& a) {
  LoadedData data = load_corpus(a.taxonomy, "");
  std::unordered_map<std::string, TermId> by_surface;
  for (const Term& t : data.corpus.terms) by_surface.emplace(t.surface, t.id);
  auto surface_id = [&](const std::string& s, const std::string& context) {
    auto it = by_surface.find(s);
    if (it == by_surface.end())
      throw DataError(context + ": node '" + s + "' not in taxonomy");
    return it->second;
  };

  std::unordered_map<std::string, std::string> gold_by_query;
  {
    std::ifstream in(a.gold);
    if (!in) throw DataError("cannot open gold file: " + a.gold);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw DataError(a.gold + ": expected query<TAB>parent");
      gold_by_query[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  const std::string ranks_path = a.ranks.empty() ? a.pred + ".ranks.tsv" : a.ranks;
  std::unordered_map<std::string, std::vector<TermId>> ranks_by_query;
  {
    std::ifstream in(ranks_path);
    if (!in)
      throw DataError("cannot open ranking file: " + ranks_path +
                      " (expand writes it next to its output; pass --ranks to override)");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::size_t start = 0;
      while (true) {
        auto tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cells.size() < 2) throw DataError(ranks_path + ": expected query<TAB>ranked parents");
      std::vector<TermId> ranking;
      for (std::size_t i = 1; i < cells.size(); ++i)
        ranking.push_back(surface_id(cells[i], ranks_path));
      ranks_by_query[cells.front()] = std::move(ranking);
    }
  }

  std::vector<RankedPrediction> preds;
  std::vector<TermId> gold;
  std::ifstream in(a.pred);
  if (!in) throw DataError("cannot open prediction file: " + a.pred);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    if (t1 == std::string::npos) throw DataError(a.pred + ": expected query<TAB>parent[<TAB>score]");
    auto t2 = line.find('\t', t1 + 1);
    const std::string query = line.substr(0, t1);
    const std::string parent =
        line.substr(t1 + 1, t2 == std::string::npos ? t2 : t2 - t1 - 1);

    auto git = gold_by_query.find(query);
    if (git == gold_by_query.end())
      throw DataError("no gold parent for query '" + query + "'");
    auto rit = ranks_by_query.find(query);
    if (rit == ranks_by_query.end())
      throw DataError(ranks_path + ": no ranking for query '" + query + "'");

    RankedPrediction p;
    p.chosen = surface_id(parent, a.pred);
    p.ranking = rit->second;
    preds.push_back(std::move(p));
    gold.push_back(surface_id(git->second, a.gold));
  }
  if (preds.empty()) throw DataError(a.pred + ": no predictions");

  Metrics m = evaluate(preds, gold, data.tree);
  std::printf("Acc   %.1f\n", 100.0 * m.acc);
  std::printf("MRR   %.1f\n", 100.0 * m.mrr);
  std::printf("Wu&P  %.1f\n", 100.0 * m.wup);
  return 0;
}

// ---------------------------------------------------------------------------
// descr

struct DescrArgs {
  std::string taxonomy, lexicon, embeddings, surface;
};

int cmd_descr(const DescrArgs& a) {
  LoadedData data = load_corpus(a.taxonomy, "");
  Lexicon lex = load_lexicon_opt(a.lexicon);
  TokenEmbeddingTable emb = load_embeddings_opt(a.embeddings);
  const std::string root_surface = data.corpus.terms[static_cast<std::size_t>(data.corpus.root)].surface;
  std::cout << describe(a.surface, root_surface, lex, emb) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// dump-scores

struct DumpArgs {
  std::string checkpoint, query, description, lexicon, embeddings, out;
};

int cmd_dump_scores(const DumpArgs& a) {
  LoadedCheckpoint ckpt = load_checkpoint(a.checkpoint);
  Lexicon lex = load_lexicon_opt(a.lexicon);
  TokenEmbeddingTable emb = load_embeddings_opt(a.embeddings);
  const std::string root_surface =
      ckpt.seed_terms[static_cast<std::size_t>(ckpt.seed.root())].surface;
  Term term;
  term.id = kNoTerm;
  term.surface = a.query;
  term.description =
      a.description.empty() ? describe(a.query, root_surface, lex, emb) : a.description;

  ScoreTable table = score_all_anchors(ckpt.model, ckpt.seed, ckpt.seed_terms, term);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw DataError("cannot write " + a.out);
    os = &file;
  }
  *os << "anchor_id,anchor,path_score,forward,current,backward,fitting\n";
  for (TermId n = 0; n < ckpt.seed.node_count(); ++n) {
    const ScoreVector& s = table[static_cast<std::size_t>(n)];
    *os << n << ',' << ckpt.seed_terms[static_cast<std::size_t>(n)].surface << ',' << fmt(s.s_p)
        << ',' << fmt(s.s_f) << ',' << fmt(s.s_c) << ',' << fmt(s.s_b) << ','
        << fmt(fitting_score(n, table, ckpt.seed, ckpt.model.cfg.root_parent_score)) << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Self-supervised taxonomy expansion engine"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a coherence scorer on a taxonomy");
  train_cmd->add_option("--taxonomy", train_args.taxonomy, "Edge TSV: parent<TAB>child")->required();
  train_cmd->add_option("--glossary", train_args.glossary, "TSV: surface<TAB>description");
  train_cmd->add_option("--lexicon", train_args.lexicon, "JSONL phrase/gloss lexicon");
  train_cmd->add_option("--embeddings", train_args.embeddings, "Token embedding text file");
  train_cmd->add_option("--config", train_args.config, "key = value config file");
  train_cmd->add_option("--out", train_args.out, "Checkpoint output path")->required();

  SplitArgs split_args;
  CLI::App* split_cmd = app.add_subcommand("split", "Materialize the seed/val/test split");
  split_cmd->add_option("--taxonomy", split_args.taxonomy, "Edge TSV")->required();
  split_cmd->add_option("--glossary", split_args.glossary, "TSV: surface<TAB>description");
  split_cmd->add_option("--config", split_args.config, "key = value config file");
  split_cmd->add_option("--out-dir", split_args.out_dir, "Output directory")->required();

  ExpandArgs expand_args;
  CLI::App* expand_cmd = app.add_subcommand("expand", "Attach query terms to a trained taxonomy");
  expand_cmd->add_option("--checkpoint", expand_args.checkpoint, "Trained checkpoint")->required();
  expand_cmd->add_option("--queries", expand_args.queries, "TSV: surface[<TAB>description]")->required();
  expand_cmd->add_option("--mode", expand_args.mode, "full|stopper|pathcur|current");
  expand_cmd->add_option("--lexicon", expand_args.lexicon, "JSONL lexicon for query descriptions");
  expand_cmd->add_option("--embeddings", expand_args.embeddings, "Token embedding text file");
  expand_cmd->add_option("--out", expand_args.out, "Prediction TSV output")->required();
  expand_cmd->add_option("--out-taxonomy", expand_args.out_taxonomy, "Write merged taxonomy TSV");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against gold parents");
  eval_cmd->add_option("--pred", eval_args.pred, "Prediction TSV from expand")->required();
  eval_cmd->add_option("--gold", eval_args.gold, "TSV: query<TAB>gold parent")->required();
  eval_cmd->add_option("--taxonomy", eval_args.taxonomy, "Seed taxonomy TSV")->required();
  eval_cmd->add_option("--ranks", eval_args.ranks, "Ranking TSV (default: <pred>.ranks.tsv)");

  DescrArgs descr_args;
  CLI::App* descr_cmd = app.add_subcommand("descr", "Generate a description for a surface name");
  descr_cmd->add_option("--taxonomy", descr_args.taxonomy, "Edge TSV (for the root surface)")->required();
  descr_cmd->add_option("--lexicon", descr_args.lexicon, "JSONL lexicon");
  descr_cmd->add_option("--embeddings", descr_args.embeddings, "Token embedding text file");
  descr_cmd->add_option("surface", descr_args.surface, "Term surface name")->required();

  DumpArgs dump_args;
  CLI::App* dump_cmd = app.add_subcommand("dump-scores", "Dump the per-anchor score table");
  dump_cmd->add_option("--checkpoint", dump_args.checkpoint, "Trained checkpoint")->required();
  dump_cmd->add_option("--query", dump_args.query, "Query surface name")->required();
  dump_cmd->add_option("--description", dump_args.description, "Query description override");
  dump_cmd->add_option("--lexicon", dump_args.lexicon, "JSONL lexicon");
  dump_cmd->add_option("--embeddings", dump_args.embeddings, "Token embedding text file");
  dump_cmd->add_option("--out", dump_args.out, "CSV output path (default: stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 2;
    }
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (split_cmd->parsed()) return cmd_split(split_args);
    if (expand_cmd->parsed()) return cmd_expand(expand_args);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (descr_cmd->parsed()) return cmd_descr(descr_args);
    if (dump_cmd->parsed()) return cmd_dump_scores(dump_args);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  }
}

int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv, argv + argc));
}

}  // namespace taxo::cli
