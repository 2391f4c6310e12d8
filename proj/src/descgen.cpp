#include "taxo/descgen.hpp"

#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "taxo/errors.hpp"
#include "taxo/rng.hpp"

namespace taxo {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char ch : text) {
    if (std::isspace(ch) || ch == '-') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(ch)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

namespace {

std::string normalize_phrase(const std::string& phrase) {
  std::string out;
  for (const std::string& tok : tokenize(phrase)) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens, int begin, int end) {
  std::string out;
  for (int i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Lexicon Lexicon::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  Lexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("phrase") || !j.contains("glosses") ||
        !j["phrase"].is_string() || !j["glosses"].is_array())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected {\"phrase\": str, \"glosses\": [str...]}");
    std::vector<std::string> glosses;
    for (const auto& g : j["glosses"]) {
      if (!g.is_string())
        throw DataError(path + ":" + std::to_string(line_no) + ": gloss must be a string");
      glosses.push_back(g.get<std::string>());
    }
    lex.add(j["phrase"].get<std::string>(), std::move(glosses));
  }
  return lex;
}

void Lexicon::add(const std::string& phrase, std::vector<std::string> glosses) {
  auto& slot = entries_[normalize_phrase(phrase)];
  for (auto& g : glosses) slot.push_back(std::move(g));
}

bool Lexicon::has(const std::string& phrase) const {
  auto it = entries_.find(normalize_phrase(phrase));
  return it != entries_.end() && !it->second.empty();
}

const std::vector<std::string>& Lexicon::glosses(const std::string& phrase) const {
  static const std::vector<std::string> kEmpty;
  auto it = entries_.find(normalize_phrase(phrase));
  return it == entries_.end() ? kEmpty : it->second;
}

TokenEmbeddingTable TokenEmbeddingTable::load_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing `dim d` header");
  std::istringstream header(line);
  std::string tag;
  int dim = 0;
  header >> tag >> dim;
  if (tag != "dim" || dim <= 0) throw DataError(path + ": malformed `dim d` header");
  TokenEmbeddingTable table(dim);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
      if (!(row >> v[i]))
        throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values for token '" + token + "'");
    table.add(token, std::move(v));
  }
  return table;
}

void TokenEmbeddingTable::add(const std::string& token, Eigen::VectorXd v) {
  if (v.size() != dim_)
    throw DataError("embedding for '" + token + "' has dimension " + std::to_string(v.size()) +
                    ", table expects " + std::to_string(dim_));
  vectors_[token] = std::move(v);
}

Eigen::VectorXd TokenEmbeddingTable::vec(const std::string& token) const {
  auto it = vectors_.find(token);
  if (it != vectors_.end()) return it->second;
  Rng rng(fnv1a64(token));
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.gaussian(0.0, 1.0);
  return v / v.norm();
}

double cos_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const TokenEmbeddingTable& emb) {
  if (a.empty() || b.empty()) throw DataError("cos_similarity: empty token sequence");
  double total = 0.0;
  for (const std::string& ta : a) {
    Eigen::VectorXd va = emb.vec(ta);
    const double na = va.norm();
    for (const std::string& tb : b) {
      Eigen::VectorXd vb = emb.vec(tb);
      const double nb = vb.norm();
      total += (na == 0.0 || nb == 0.0) ? 0.0 : va.dot(vb) / (na * nb);
    }
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

int span_score(const std::vector<std::string>& tokens, const Span& s, const Lexicon& lex) {
  const int len = s.end - s.begin;
  return lex.has(join_tokens(tokens, s.begin, s.end)) ? len * len + 1 : 1;
}

int segmentation_score(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                       const Lexicon& lex) {
  int total = 0;
  for (const Span& s : spans) total += span_score(tokens, s, lex);
  return total;
}

std::vector<Span> best_segmentation(const std::vector<std::string>& tokens, const Lexicon& lex) {
  if (tokens.empty()) throw DataError("best_segmentation: empty token sequence");
  const int n = static_cast<int>(tokens.size());
  // score[i] = best total over the first i tokens; cut[i] = start of the
  // final span of that optimum. Scanning starts from j = 0 with strict
  // improvement, so equal totals keep the longest trailing concept.
  std::vector<int> score(n + 1, 0), cut(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const int s = span_score(tokens, {j, i + 1}, lex);
      if (score[j] + s > score[i + 1]) {
        score[i + 1] = score[j] + s;
        cut[i + 1] = j;
      }
    }
  }
  std::vector<Span> spans;
  for (int p = n; p > 0; p = cut[p]) spans.push_back({cut[p], p});
  std::reverse(spans.begin(), spans.end());
  return spans;
}

std::string describe(const std::string& surface, const std::string& root_surface,
                     const Lexicon& lex, const TokenEmbeddingTable& emb) {
  std::vector<std::string> tokens = tokenize(surface);
  if (tokens.empty()) return surface;
  const std::vector<std::string> root_tokens = tokenize(root_surface);
  std::string out;
  for (const Span& span : best_segmentation(tokens, lex)) {
    const std::string phrase = join_tokens(tokens, span.begin, span.end);
    std::string fragment = phrase;
    if (lex.has(phrase)) {
      const auto& candidates = lex.glosses(phrase);
      fragment = candidates.front();
      double best = -2.0;
      for (const std::string& g : candidates) {
        const auto gtok = tokenize(g);
        if (gtok.empty() || root_tokens.empty()) continue;
        const double sim = cos_similarity(gtok, root_tokens, emb);
        if (sim > best) {
          best = sim;
          fragment = g;
        }
      }
    }
    if (!out.empty()) out.push_back(' ');
    out += fragment;
  }
  return out;
}

}  // namespace taxo
