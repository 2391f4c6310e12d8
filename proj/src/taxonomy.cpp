#include "taxo/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "taxo/errors.hpp"

namespace taxo {

Taxonomy Taxonomy::from_edges(int node_count, const std::vector<Edge>& edges, TermId root) {
  if (node_count <= 0) throw DataError("taxonomy: empty node set");
  if (root < 0 || root >= node_count) throw DataError("taxonomy: root id out of range");
  Taxonomy t;
  t.root_ = root;
  t.parent_.assign(node_count, kNoTerm);
  t.children_.assign(node_count, {});
  t.depth_.assign(node_count, 0);
  for (const Edge& e : edges) {
    if (e.parent < 0 || e.parent >= node_count || e.child < 0 || e.child >= node_count)
      throw DataError("taxonomy: edge references unknown node");
    if (e.child == root) throw DataError("taxonomy: root cannot have a parent");
    if (t.parent_[e.child] != kNoTerm)
      throw DataError("taxonomy: node " + std::to_string(e.child) + " has multiple parents");
    t.parent_[e.child] = e.parent;
    t.children_[e.parent].push_back(e.child);
  }
  // Depth assignment doubles as the reachability / acyclicity check.
  std::deque<TermId> queue{root};
  t.depth_[root] = 1;
  int seen = 1;
  while (!queue.empty()) {
    TermId u = queue.front();
    queue.pop_front();
    for (TermId c : t.children_[u]) {
      t.depth_[c] = t.depth_[u] + 1;
      ++seen;
      queue.push_back(c);
    }
  }
  if (seen != node_count) {
    for (TermId n = 0; n < node_count; ++n)
      if (n != root && t.depth_[n] == 0)
        throw DataError("taxonomy: node " + std::to_string(n) + " unreachable from root");
  }
  t.validate();
  return t;
}

void Taxonomy::check_node(TermId n, const char* what) const {
  if (!contains(n))
    throw DataError(std::string(what) + ": unknown node " + std::to_string(n));
}

TermId Taxonomy::parent(TermId n) const {
  check_node(n, "parent");
  return parent_[n];
}

const std::vector<TermId>& Taxonomy::children(TermId n) const {
  check_node(n, "children");
  return children_[n];
}

int Taxonomy::depth(TermId n) const {
  check_node(n, "depth");
  return depth_[n];
}

bool Taxonomy::is_leaf(TermId n) const {
  check_node(n, "is_leaf");
  return children_[n].empty();
}

std::vector<TermId> Taxonomy::ancestors(TermId n) const {
  check_node(n, "ancestors");
  std::vector<TermId> out;
  for (TermId p = parent_[n]; p != kNoTerm; p = parent_[p]) out.push_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<TermId> Taxonomy::descendants(TermId n) const {
  check_node(n, "descendants");
  std::vector<TermId> out;
  std::deque<TermId> queue{n};
  while (!queue.empty()) {
    TermId u = queue.front();
    queue.pop_front();
    for (TermId c : children_[u]) {
      out.push_back(c);
      queue.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TermId Taxonomy::lca(TermId a, TermId b) const {
  check_node(a, "lca");
  check_node(b, "lca");
  while (depth_[a] > depth_[b]) a = parent_[a];
  while (depth_[b] > depth_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
  }
  return a;
}

double Taxonomy::leaf_fraction() const {
  int leaves = 0;
  for (const auto& c : children_)
    if (c.empty()) ++leaves;
  return static_cast<double>(leaves) / static_cast<double>(node_count());
}

std::vector<TermId> Taxonomy::leaves() const {
  std::vector<TermId> out;
  for (TermId n = 0; n < node_count(); ++n)
    if (children_[n].empty()) out.push_back(n);
  return out;
}

std::vector<Edge> Taxonomy::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(node_count()) - 1);
  for (TermId p = 0; p < node_count(); ++p)
    for (TermId c : children_[p]) out.push_back({p, c});
  return out;
}

void Taxonomy::validate() const {
  const int n = node_count();
  if (n == 0) throw DataError("taxonomy: empty");
  if (!contains(root_) || parent_[root_] != kNoTerm)
    throw DataError("taxonomy: invalid root");
  int edge_count = 0;
  for (TermId u = 0; u < n; ++u) {
    if (u != root_ && parent_[u] == kNoTerm)
      throw DataError("taxonomy: node " + std::to_string(u) + " has no parent");
    if (u == root_) {
      if (depth_[u] != 1) throw DataError("taxonomy: root depth must be 1");
    } else {
      if (depth_[u] != depth_[parent_[u]] + 1)
        throw DataError("taxonomy: depth inconsistency at node " + std::to_string(u));
      const auto& sib = children_[parent_[u]];
      if (std::find(sib.begin(), sib.end(), u) == sib.end())
        throw DataError("taxonomy: parent/children maps disagree at node " + std::to_string(u));
    }
    // Parent chain must terminate at the root within n steps (no cycles).
    TermId p = u;
    int steps = 0;
    while (p != root_) {
      p = parent_[p];
      if (p == kNoTerm || ++steps > n)
        throw DataError("taxonomy: cycle through node " + std::to_string(u));
    }
    edge_count += static_cast<int>(children_[u].size());
    for (TermId c : children_[u])
      if (!contains(c) || parent_[c] != u)
        throw DataError("taxonomy: children/parent maps disagree at node " + std::to_string(u));
  }
  if (edge_count != n - 1) throw DataError("taxonomy: edge count must be node count - 1");
}

Taxonomy prune_to_spanning_tree(int node_count, const std::vector<Edge>& edges, TermId root) {
  if (node_count <= 0) throw DataError("prune: empty node set");
  if (root < 0 || root >= node_count) throw DataError("prune: root id out of range");
  std::vector<std::vector<TermId>> adj(node_count);
  for (const Edge& e : edges) {
    if (e.parent < 0 || e.parent >= node_count || e.child < 0 || e.child >= node_count)
      throw DataError("prune: edge references unknown node");
    adj[e.parent].push_back(e.child);
  }
  std::vector<Edge> kept;
  kept.reserve(static_cast<std::size_t>(node_count) - 1);
  std::vector<bool> discovered(node_count, false);
  discovered[root] = true;
  std::deque<TermId> queue{root};
  while (!queue.empty()) {
    TermId u = queue.front();
    queue.pop_front();
    for (TermId c : adj[u]) {
      if (discovered[c]) continue;  // first-discovered parent wins
      discovered[c] = true;
      kept.push_back({u, c});
      queue.push_back(c);
    }
  }
  for (TermId n = 0; n < node_count; ++n)
    if (!discovered[n])
      throw DataError("prune: node " + std::to_string(n) + " unreachable from root");
  return Taxonomy::from_edges(node_count, kept, root);
}

void ExpandedTaxonomy::attach(TermId anchor, TermId query) {
  int anchor_depth;
  if (base_->contains(anchor)) {
    anchor_depth = base_->depth(anchor);
  } else {
    auto it = added_depth_.find(anchor);
    if (it == added_depth_.end())
      throw DataError("attach: anchor " + std::to_string(anchor) + " not in expanded taxonomy");
    anchor_depth = it->second;
  }
  if (base_->contains(query) || added_depth_.count(query))
    throw DataError("attach: query id " + std::to_string(query) + " already present");
  additions_.push_back({anchor, query});
  added_depth_[query] = anchor_depth + 1;
}

int ExpandedTaxonomy::depth(TermId n) const {
  if (base_->contains(n)) return base_->depth(n);
  auto it = added_depth_.find(n);
  if (it == added_depth_.end())
    throw DataError("depth: unknown node " + std::to_string(n));
  return it->second;
}

TermId Corpus::find(const std::string& surface) const {
  for (const Term& t : terms)
    if (t.surface == surface) return t.id;
  return kNoTerm;
}

namespace {

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Corpus load_taxonomy_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open taxonomy file: " + path);
  Corpus corpus;
  std::unordered_map<std::string, TermId> by_surface;
  auto intern = [&](const std::string& s) -> TermId {
    auto it = by_surface.find(s);
    if (it != by_surface.end()) return it->second;
    TermId id = static_cast<TermId>(corpus.terms.size());
    corpus.terms.push_back({id, s, ""});
    by_surface.emplace(s, id);
    return id;
  };
  std::string line;
  int line_no = 0;
  std::vector<bool> appears_as_child;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected parent<TAB>child");
    std::string ps = line.substr(0, tab);
    std::string cs = line.substr(tab + 1);
    if (ps.empty() || cs.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": empty surface name");
    TermId p = intern(ps);
    TermId c = intern(cs);
    corpus.edges.push_back({p, c});
    if (static_cast<std::size_t>(std::max(p, c)) >= appears_as_child.size())
      appears_as_child.resize(corpus.terms.size(), false);
    appears_as_child[c] = true;
  }
  if (corpus.edges.empty()) throw DataError(path + ": no edges");
  appears_as_child.resize(corpus.terms.size(), false);
  std::vector<TermId> roots;
  for (const Term& t : corpus.terms)
    if (!appears_as_child[t.id]) roots.push_back(t.id);
  if (roots.empty()) throw DataError(path + ": no root (every node has a parent)");
  if (roots.size() > 1) {
    std::string msg = path + ": multiple roots:";
    for (TermId r : roots) msg += " '" + corpus.terms[r].surface + "'";
    throw DataError(msg);
  }
  corpus.root = roots.front();
  return corpus;
}

void save_taxonomy_tsv(const std::string& path, const Taxonomy& t, const std::vector<Term>& terms) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write taxonomy file: " + path);
  for (const Edge& e : t.edges())
    out << terms[e.parent].surface << '\t' << terms[e.child].surface << '\n';
}

void apply_glossary_tsv(const std::string& path, std::vector<Term>& terms) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open glossary file: " + path);
  std::unordered_map<std::string, std::string> gloss;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    std::string surface = tab == std::string::npos ? line : line.substr(0, tab);
    std::string descr = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (surface.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": empty surface name");
    gloss[surface] = descr;
  }
  for (Term& t : terms) {
    auto it = gloss.find(t.surface);
    if (it != gloss.end() && !it->second.empty()) t.description = it->second;
  }
}

DatasetSplit split_dataset(const Taxonomy& t, const std::vector<Term>& terms, double test_ratio,
                           int val_count, Rng& rng) {
  if (test_ratio < 0.0 || test_ratio >= 1.0)
    throw ConfigError("split: test_ratio must be in [0, 1)");
  const int n = t.node_count();
  const int hold = static_cast<int>(std::llround(test_ratio * n));
  std::vector<TermId> pool;
  for (TermId leaf : t.leaves())
    if (leaf != t.root()) pool.push_back(leaf);
  if (hold > static_cast<int>(pool.size()))
    throw ConfigError("split: need " + std::to_string(hold) + " leaves but only " +
                      std::to_string(pool.size()) + " available");
  if (val_count > hold)
    throw ConfigError("split: val_count " + std::to_string(val_count) + " exceeds held-out count " +
                      std::to_string(hold));
  std::vector<TermId> held = rng.sample(pool, static_cast<std::size_t>(hold));

  std::vector<bool> removed(n, false);
  for (TermId h : held) removed[h] = true;

  DatasetSplit split;
  split.old_to_new.assign(n, kNoTerm);
  TermId next = 0;
  for (TermId u = 0; u < n; ++u)
    if (!removed[u]) split.old_to_new[u] = next++;
  std::vector<Edge> seed_edges;
  for (const Edge& e : t.edges())
    if (!removed[e.parent] && !removed[e.child])
      seed_edges.push_back({split.old_to_new[e.parent], split.old_to_new[e.child]});
  split.seed = Taxonomy::from_edges(next, seed_edges, split.old_to_new[t.root()]);
  split.seed_terms.resize(next);
  for (TermId u = 0; u < n; ++u) {
    if (removed[u]) continue;
    Term term = terms[u];
    term.id = split.old_to_new[u];
    split.seed_terms[term.id] = std::move(term);
  }
  for (std::size_t i = 0; i < held.size(); ++i) {
    Query q;
    q.term = terms[held[i]];
    q.term.id = kNoTerm;
    q.gold_parent = split.old_to_new[t.parent(held[i])];
    if (q.gold_parent == kNoTerm)
      throw DataError("split: held-out node's parent was also removed");
    if (static_cast<int>(i) < val_count)
      split.val.push_back(std::move(q));
    else
      split.test.push_back(std::move(q));
  }
  return split;
}

}  // namespace taxo
