#pragma once

#include <unordered_map>
#include <vector>

#include "taxo/blocks.hpp"
#include "taxo/config.hpp"
#include "taxo/graph.hpp"
#include "taxo/taxonomy.hpp"

namespace taxo {

inline constexpr int kSegmentAnchor = 0;
inline constexpr int kSegmentQuery = 1;
inline constexpr int kSegmentOther = 2;

struct EgoNode {
  TermId id;
  int depth;
  int segment;
};

// Anchor's ancestors + anchor + up to child_sample_k surface-similar
// children + the attached query (depth anchor+1).
struct EgoTree {
  std::vector<EgoNode> nodes;
  TermId anchor = kNoTerm;
  TermId query = kNoTerm;
};

// Token-set Jaccard between two surface names.
double surface_jaccard(const std::string& a, const std::string& b);

// `exclude` hides one child (the query's own seed node during training).
// The query term must carry a usable id distinct from every seed id.
EgoTree build_ego_tree(const Taxonomy& t, const std::vector<Term>& terms, TermId anchor,
                       const Term& query, int child_sample_k, TermId exclude = kNoTerm);

struct CoherenceParams {
  std::vector<nn::EncoderLayerParams> layers;
  nn::Tensor abs_lvl;    // rows indexed by depth, 1..max_depth+1
  nn::Tensor rel_lvl;    // rows indexed by (depth - query_depth) + max_depth
  nn::Tensor seg;        // 3 segment rows
  nn::Tensor cls_path;   // placeholder row read out as the path representation
  nn::Tensor cls_level;  // placeholder row read out as the level representation
  nn::Tensor p_w1, p_b1, p_w2, p_b2;  // pathfinder head
  nn::Tensor s_w1, s_b1, s_w2, s_b2;  // stopper head

  void init(const RunConfig& cfg, Rng& rng);
  void collect(std::vector<nn::Tensor*>& out);
};

// One row per ego-tree node: pair representation + level + segment
// embeddings, with the two placeholder rows stacked in front.
nn::Graph::Ref assemble_input(nn::Graph& g, const EgoTree& ego,
                              const std::unordered_map<TermId, nn::Graph::Ref>& pair_reps,
                              CoherenceParams& params, const RunConfig& cfg);

struct CoherenceOut {
  nn::Graph::Ref path_vec;   // row 0
  nn::Graph::Ref level_vec;  // row 1
};

CoherenceOut coherence_forward(nn::Graph& g, nn::Graph::Ref input, CoherenceParams& params,
                               int heads);

// sigmoid(w2 . tanh(w1 . p + b1) + b2), scalar in (0, 1).
nn::Graph::Ref pathfinder_score(nn::Graph& g, nn::Graph::Ref path_vec, CoherenceParams& params);

// softmax over (forward, current, backward) logits, 1x3.
nn::Graph::Ref stopper_scores(nn::Graph& g, nn::Graph::Ref level_vec, CoherenceParams& params);

}  // namespace taxo
