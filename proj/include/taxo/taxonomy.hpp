#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxo/rng.hpp"

namespace taxo {

using TermId = std::int32_t;
inline constexpr TermId kNoTerm = -1;

struct Term {
  TermId id = kNoTerm;
  std::string surface;
  std::string description;  // generated before encoding when empty
};

struct Edge {
  TermId parent = kNoTerm;
  TermId child = kNoTerm;
};

// Immutable arborescence over dense ids [0, n). Root depth is 1. Safe for
// concurrent readers once constructed.
class Taxonomy {
 public:
  Taxonomy() = default;

  // Builds from a strict tree edge list and validates every structural
  // invariant. Throws DataError on violations.
  static Taxonomy from_edges(int node_count, const std::vector<Edge>& edges, TermId root);

  int node_count() const { return static_cast<int>(parent_.size()); }
  TermId root() const { return root_; }
  bool contains(TermId n) const { return n >= 0 && n < node_count(); }
  TermId parent(TermId n) const;  // kNoTerm for the root
  const std::vector<TermId>& children(TermId n) const;
  int depth(TermId n) const;
  bool is_leaf(TermId n) const;

  // Nodes on n's root path excluding n itself, root first. Empty for root.
  std::vector<TermId> ancestors(TermId n) const;
  // All nodes whose root path passes through n, excluding n. Ascending ids.
  std::vector<TermId> descendants(TermId n) const;
  // Deepest common node of both root paths; a node is its own ancestor here.
  TermId lca(TermId a, TermId b) const;

  // (#nodes with no children) / node_count.
  double leaf_fraction() const;
  std::vector<TermId> leaves() const;
  std::vector<Edge> edges() const;

  void validate() const;

 private:
  void check_node(TermId n, const char* what) const;

  TermId root_ = kNoTerm;
  std::vector<TermId> parent_;
  std::vector<std::vector<TermId>> children_;
  std::vector<int> depth_;
};

// Keeps one parent per node from a connected rooted edge list: BFS from the
// root over the input edge order, first-discovered parent wins. Throws
// DataError for nodes unreachable from the root.
Taxonomy prune_to_spanning_tree(int node_count, const std::vector<Edge>& edges, TermId root);

// Attachment overlay. The base taxonomy is never mutated; additions are
// recorded on the side so batch inference over many queries shares one base.
// Single-writer for attach().
class ExpandedTaxonomy {
 public:
  explicit ExpandedTaxonomy(const Taxonomy& base) : base_(&base) {}

  // Anchor must exist in the base or be an earlier-attached query.
  void attach(TermId anchor, TermId query);
  int depth(TermId n) const;  // attached nodes sit one level below their anchor
  const std::vector<Edge>& additions() const { return additions_; }
  const Taxonomy& base() const { return *base_; }

 private:
  const Taxonomy* base_;
  std::vector<Edge> additions_;
  std::unordered_map<TermId, int> added_depth_;
};

// Raw dataset as read from disk: term table plus the original edge list,
// which may still contain multi-parent nodes until pruned.
struct Corpus {
  std::vector<Term> terms;  // index == TermId
  std::vector<Edge> edges;
  TermId root = kNoTerm;

  TermId find(const std::string& surface) const;
};

// TSV, one edge per line: parent_surface<TAB>child_surface. The unique
// parent surface that never appears as a child is the root.
Corpus load_taxonomy_tsv(const std::string& path);
void save_taxonomy_tsv(const std::string& path, const Taxonomy& t, const std::vector<Term>& terms);

// TSV surface<TAB>description; fills descriptions of matching terms.
void apply_glossary_tsv(const std::string& path, std::vector<Term>& terms);

struct Query {
  Term term;            // id is unset; assigned when the query is scored
  TermId gold_parent;   // seed-taxonomy id
};

struct DatasetSplit {
  Taxonomy seed;
  std::vector<Term> seed_terms;     // reindexed to seed ids
  std::vector<Query> val, test;
  std::vector<TermId> old_to_new;   // kNoTerm for held-out nodes
};

// Holds out round(test_ratio * n) leaves (root excluded from candidates),
// reserves val_count of them for early stopping and returns the remainder
// as the test set. Deterministic in rng.
DatasetSplit split_dataset(const Taxonomy& t, const std::vector<Term>& terms, double test_ratio,
                           int val_count, Rng& rng);

}  // namespace taxo
