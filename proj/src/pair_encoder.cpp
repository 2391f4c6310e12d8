#include "taxo/pair_encoder.hpp"

#include "taxo/descgen.hpp"
#include "taxo/errors.hpp"

namespace taxo {

Vocabulary::Vocabulary() {
  for (const char* s : {"<pad>", "<unk>", "<cls>", "<sep>"}) add(s);
}

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

void Vocabulary::add_text(const std::string& text) {
  for (const std::string& tok : tokenize(text)) add(tok);
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

const std::string& encoding_text(const Term& t) {
  return t.description.empty() ? t.surface : t.description;
}

PairInput build_pair_input(const Term& first, const Term& second, const Vocabulary& vocab,
                           int max_len) {
  if (max_len < 5)
    throw ConfigError("pair input length " + std::to_string(max_len) +
                      " leaves no room for specials plus one token per side");
  auto to_ids = [&](const Term& t) {
    std::vector<int> ids;
    for (const std::string& tok : tokenize(encoding_text(t))) ids.push_back(vocab.id(tok));
    if (ids.empty()) ids.push_back(Vocabulary::kUnk);
    return ids;
  };
  std::vector<int> a = to_ids(first);
  std::vector<int> b = to_ids(second);
  // Longer segment loses tail tokens first; exact ties shrink both.
  while (3 + static_cast<int>(a.size() + b.size()) > max_len) {
    if (a.size() > b.size())
      a.pop_back();
    else if (b.size() > a.size())
      b.pop_back();
    else {
      a.pop_back();
      b.pop_back();
    }
  }
  PairInput in;
  in.tokens.reserve(static_cast<std::size_t>(max_len));
  in.marks.reserve(static_cast<std::size_t>(max_len));
  auto put = [&](int id, Mark m) {
    in.tokens.push_back(id);
    in.marks.push_back(m);
  };
  put(Vocabulary::kCls, Mark::Special);
  for (int id : a) put(id, Mark::FirstText);
  put(Vocabulary::kSep, Mark::Special);
  for (int id : b) put(id, Mark::SecondText);
  put(Vocabulary::kSep, Mark::Special);
  while (in.length() < max_len) put(Vocabulary::kPad, Mark::Pad);
  return in;
}

void PairEncoderParams::init(int vocab_size, int d_model, int max_len, Rng& rng) {
  tok_emb = nn::Tensor("pair.tok_emb", vocab_size, d_model);
  pos_emb = nn::Tensor("pair.pos_emb", max_len, d_model);
  nn::gaussian_init(tok_emb, rng);
  nn::gaussian_init(pos_emb, rng);
  attn.init("pair.attn", d_model, rng);
}

void PairEncoderParams::collect(std::vector<nn::Tensor*>& out) {
  out.push_back(&tok_emb);
  out.push_back(&pos_emb);
  attn.collect(out);
}

nn::Graph::Ref encode_pair(nn::Graph& g, const PairInput& in, PairEncoderParams& params,
                           int heads) {
  const int len = in.length();
  if (len > params.pos_emb.rows())
    throw DataError("pair input longer than position table");
  std::vector<int> positions(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) positions[static_cast<std::size_t>(i)] = i;
  nn::Graph::Ref tok = g.embed_rows(params.tok_emb, in.tokens);
  nn::Graph::Ref pos = g.embed_rows(params.pos_emb, positions);
  nn::Graph::Ref e = g.add(tok, pos);

  // Hide PAD keys from attention and from the pooled residual, so trailing
  // padding cannot leak into the representation.
  nn::Mat mask = nn::Mat::Zero(len, len);
  int valid = 0;
  for (int j = 0; j < len; ++j) {
    if (in.marks[static_cast<std::size_t>(j)] == Mark::Pad)
      mask.col(j).setConstant(-1e9);
    else
      ++valid;
  }
  nn::Mat pool = nn::Mat::Zero(1, len);
  for (int j = 0; j < len; ++j)
    if (in.marks[static_cast<std::size_t>(j)] != Mark::Pad)
      pool(0, j) = 1.0 / static_cast<double>(valid);

  nn::Graph::Ref a = attention(g, e, params.attn, heads, &mask);
  // CLS attention output plus the mean-pooled embeddings: the pooled term
  // carries token content directly instead of through two init-scale
  // projections, which matters when training from scratch. GELU rather than
  // an odd nonlinearity: its even component turns the pooled sum into a
  // token-overlap detector that a linear readout can pick up.
  nn::Graph::Ref mixed = g.add(g.slice_rows(a, 0, 1), g.matmul(g.input(pool), e));
  return g.gelu_(mixed);
}

}  // namespace taxo
