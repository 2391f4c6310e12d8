#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxo/blocks.hpp"
#include "taxo/graph.hpp"
#include "taxo/taxonomy.hpp"

namespace taxo {

// Token table shared by the pair encoder and checkpoints. Specials first,
// then corpus tokens in first-seen order so ids are reproducible.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;

  Vocabulary();

  int add(const std::string& token);       // get-or-insert
  void add_text(const std::string& text);  // tokenize + add every token
  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

enum class Mark : std::uint8_t { Special, FirstText, SecondText, Pad };

// Fixed-length CLS ( first text ) SEP ( second text ) SEP PAD... sequence.
struct PairInput {
  std::vector<int> tokens;
  std::vector<Mark> marks;

  int length() const { return static_cast<int>(tokens.size()); }
};

// Returns the text a term is encoded from: its description when present,
// otherwise its surface name.
const std::string& encoding_text(const Term& t);

// Builds the pair sequence. When the two texts exceed the budget, the longer
// one loses tokens from its tail first; both SEP markers always survive.
// Throws ConfigError when max_len < 5.
PairInput build_pair_input(const Term& first, const Term& second, const Vocabulary& vocab,
                           int max_len);

struct PairEncoderParams {
  nn::Tensor tok_emb;  // vocab x d_model
  nn::Tensor pos_emb;  // max_len x d_model
  nn::AttentionParams attn;

  void init(int vocab_size, int d_model, int max_len, Rng& rng);
  void collect(std::vector<nn::Tensor*>& out);
};

// Encodes a pair into the CLS-row representation: token + position
// embeddings through one masked self-attention block and a tanh, row 0 out.
// PAD keys are hidden from attention, so trailing padding cannot leak into
// the representation.
nn::Graph::Ref encode_pair(nn::Graph& g, const PairInput& in, PairEncoderParams& params,
                           int heads);

}  // namespace taxo
