#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

namespace taxo {

// Lowercases and splits on whitespace and hyphens.
std::vector<std::string> tokenize(const std::string& text);

// Phrase -> glosses store. Phrases are normalized through tokenize() so
// lookups are exact after case/whitespace/hyphen normalization; gloss order
// follows file order (ties in gloss selection break on it).
class Lexicon {
 public:
  Lexicon() = default;

  // JSON-lines: {"phrase": string, "glosses": [string, ...]} per line.
  static Lexicon load_jsonl(const std::string& path);

  void add(const std::string& phrase, std::vector<std::string> glosses);
  bool has(const std::string& phrase) const;
  const std::vector<std::string>& glosses(const std::string& phrase) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

// Word-vector table with a deterministic hash-derived unit vector for
// out-of-vocabulary tokens, so similarity is total over any token.
class TokenEmbeddingTable {
 public:
  explicit TokenEmbeddingTable(int dim = 16) : dim_(dim) {}

  // Text format: header line `dim d`, then `token v1 v2 ... vd` per line.
  static TokenEmbeddingTable load_text(const std::string& path);

  int dim() const { return dim_; }
  void add(const std::string& token, Eigen::VectorXd v);
  // Stored vector, or the OOV fallback (pure function of the token string).
  Eigen::VectorXd vec(const std::string& token) const;

 private:
  int dim_;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

// Mean cosine over all token pairs of the two sequences. Throws DataError
// when either sequence is empty.
double cos_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const TokenEmbeddingTable& emb);

struct Span {
  int begin = 0;  // token index, inclusive
  int end = 0;    // token index, exclusive
};

// Segmentation maximizing the sum of span scores, where a span scores
// len^2 + 1 when the lexicon knows the phrase and 1 otherwise. Ties prefer
// the longer trailing concept.
std::vector<Span> best_segmentation(const std::vector<std::string>& tokens, const Lexicon& lex);

int span_score(const std::vector<std::string>& tokens, const Span& s, const Lexicon& lex);
int segmentation_score(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                       const Lexicon& lex);

// Expands a surface name into a domain-relevant description: each known span
// contributes the gloss most similar to the taxonomy root's surface name,
// unknown spans contribute their literal tokens.
std::string describe(const std::string& surface, const std::string& root_surface,
                     const Lexicon& lex, const TokenEmbeddingTable& emb);

}  // namespace taxo
