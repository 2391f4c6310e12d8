#include "taxo/coherence.hpp"

#include <algorithm>
#include <set>

#include "taxo/descgen.hpp"
#include "taxo/errors.hpp"

namespace taxo {

double surface_jaccard(const std::string& a, const std::string& b) {
  const auto ta = tokenize(a);
  const auto tb = tokenize(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  int inter = 0;
  for (const auto& t : sa) inter += sb.count(t) ? 1 : 0;
  const int uni = static_cast<int>(sa.size() + sb.size()) - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

EgoTree build_ego_tree(const Taxonomy& t, const std::vector<Term>& terms, TermId anchor,
                       const Term& query, int child_sample_k, TermId exclude) {
  if (!t.contains(anchor))
    throw DataError("build_ego_tree: unknown anchor " + std::to_string(anchor));
  EgoTree ego;
  ego.anchor = anchor;
  ego.query = query.id;
  for (TermId a : t.ancestors(anchor)) ego.nodes.push_back({a, t.depth(a), kSegmentOther});
  ego.nodes.push_back({anchor, t.depth(anchor), kSegmentAnchor});

  // Children most surface-similar to the query; ties keep child order.
  std::vector<std::pair<double, int>> ranked;
  const auto& kids = t.children(anchor);
  for (int i = 0; i < static_cast<int>(kids.size()); ++i) {
    if (kids[i] == exclude) continue;
    ranked.push_back({surface_jaccard(terms[kids[i]].surface, query.surface), i});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  if (static_cast<int>(ranked.size()) > child_sample_k) ranked.resize(child_sample_k);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  for (const auto& [sim, idx] : ranked) {
    TermId c = kids[idx];
    ego.nodes.push_back({c, t.depth(c), kSegmentOther});
  }

  ego.nodes.push_back({query.id, t.depth(anchor) + 1, kSegmentQuery});
  return ego;
}

void CoherenceParams::init(const RunConfig& cfg, Rng& rng) {
  layers.resize(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l)
    layers[static_cast<std::size_t>(l)].init("coh.layer" + std::to_string(l), cfg.d_model, rng);
  abs_lvl = nn::Tensor("coh.abs_lvl", cfg.max_depth + 2, cfg.d_model);
  rel_lvl = nn::Tensor("coh.rel_lvl", 2 * cfg.max_depth + 1, cfg.d_model);
  seg = nn::Tensor("coh.seg", 3, cfg.d_model);
  cls_path = nn::Tensor("coh.cls_path", 1, cfg.d_model);
  cls_level = nn::Tensor("coh.cls_level", 1, cfg.d_model);
  p_w1 = nn::Tensor("coh.p_w1", cfg.d_model, cfg.head_hidden);
  p_b1 = nn::Tensor("coh.p_b1", 1, cfg.head_hidden);
  p_w2 = nn::Tensor("coh.p_w2", cfg.head_hidden, 1);
  p_b2 = nn::Tensor("coh.p_b2", 1, 1);
  s_w1 = nn::Tensor("coh.s_w1", cfg.d_model, cfg.head_hidden);
  s_b1 = nn::Tensor("coh.s_b1", 1, cfg.head_hidden);
  s_w2 = nn::Tensor("coh.s_w2", cfg.head_hidden, 3);
  s_b2 = nn::Tensor("coh.s_b2", 1, 3);
  for (nn::Tensor* t : {&abs_lvl, &rel_lvl, &seg, &cls_path, &cls_level, &p_w1, &p_b1, &p_w2,
                        &p_b2, &s_w1, &s_b1, &s_w2, &s_b2})
    nn::gaussian_init(*t, rng);
}

void CoherenceParams::collect(std::vector<nn::Tensor*>& out) {
  for (auto& layer : layers) layer.collect(out);
  for (nn::Tensor* t : {&abs_lvl, &rel_lvl, &seg, &cls_path, &cls_level, &p_w1, &p_b1, &p_w2,
                        &p_b2, &s_w1, &s_b1, &s_w2, &s_b2})
    out.push_back(t);
}

nn::Graph::Ref assemble_input(nn::Graph& g, const EgoTree& ego,
                              const std::unordered_map<TermId, nn::Graph::Ref>& pair_reps,
                              CoherenceParams& params, const RunConfig& cfg) {
  int query_depth = 0, anchor_depth = 0;
  for (const EgoNode& n : ego.nodes) {
    if (n.segment == kSegmentQuery) query_depth = n.depth;
    if (n.segment == kSegmentAnchor) anchor_depth = n.depth;
  }

  std::vector<nn::Graph::Ref> rows;
  rows.reserve(ego.nodes.size() + 2);
  rows.push_back(g.param(params.cls_path));
  rows.push_back(g.param(params.cls_level));
  for (const EgoNode& n : ego.nodes) {
    auto it = pair_reps.find(n.id);
    if (it == pair_reps.end())
      throw DataError("assemble_input: missing pair representation for node " +
                      std::to_string(n.id));
    nn::Graph::Ref row = it->second;
    if (cfg.use_abs_level) {
      // The query sits one level below the anchor by construction.
      const int depth = n.segment == kSegmentQuery ? anchor_depth + 1 : n.depth;
      const int idx = std::clamp(depth, 1, cfg.max_depth + 1);
      row = g.add(row, g.embed_rows(params.abs_lvl, {idx}));
    }
    if (cfg.use_rel_level) {
      const int idx = std::clamp(n.depth - query_depth + cfg.max_depth, 0, 2 * cfg.max_depth);
      row = g.add(row, g.embed_rows(params.rel_lvl, {idx}));
    }
    row = g.add(row, g.embed_rows(params.seg, {n.segment}));
    rows.push_back(row);
  }
  return g.concat_rows(rows);
}

CoherenceOut coherence_forward(nn::Graph& g, nn::Graph::Ref input, CoherenceParams& params,
                               int heads) {
  nn::Graph::Ref x = input;
  for (auto& layer : params.layers) x = encoder_layer(g, x, layer, heads, nullptr);
  return {g.slice_rows(x, 0, 1), g.slice_rows(x, 1, 2)};
}

nn::Graph::Ref pathfinder_score(nn::Graph& g, nn::Graph::Ref path_vec, CoherenceParams& params) {
  nn::Graph::Ref h = g.tanh_(linear(g, path_vec, params.p_w1, params.p_b1));
  return g.sigmoid_(linear(g, h, params.p_w2, params.p_b2));
}

nn::Graph::Ref stopper_scores(nn::Graph& g, nn::Graph::Ref level_vec, CoherenceParams& params) {
  nn::Graph::Ref h = g.tanh_(linear(g, level_vec, params.s_w1, params.s_b1));
  return g.softmax_rows(linear(g, h, params.s_w2, params.s_b2));
}

}  // namespace taxo
