#include "taxo/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <unordered_map>

#include "taxo/errors.hpp"

namespace taxo {

namespace {

constexpr char kMagic[8] = {'T', 'A', 'X', 'O', 'C', 'K', 'P', 'T'};
constexpr char kFooter[8] = {'T', 'A', 'X', 'O', 'E', 'N', 'D', '!'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_i32(std::ostream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_str(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct Reader {
  std::istream& in;
  const std::string& name;

  void fail(const std::string& what) const {
    throw DataError(name + ": checkpoint integrity error: " + what);
  }

  void raw(void* dst, std::size_t bytes, const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) fail(std::string("truncated ") + what);
  }

  std::uint32_t u32(const char* what) {
    std::uint32_t v;
    raw(&v, sizeof(v), what);
    return v;
  }

  std::uint64_t u64(const char* what) {
    std::uint64_t v;
    raw(&v, sizeof(v), what);
    return v;
  }

  std::int32_t i32(const char* what) {
    std::int32_t v;
    raw(&v, sizeof(v), what);
    return v;
  }

  std::string str(const char* what) {
    std::uint64_t len = u64(what);
    if (len > (1ull << 32)) fail(std::string("implausible length in ") + what);
    std::string s(static_cast<std::size_t>(len), '\0');
    if (len) raw(s.data(), static_cast<std::size_t>(len), what);
    return s;
  }
};

}  // namespace

void write_checkpoint(std::ostream& out, std::uint32_t version, const std::string& config_text,
                      const Vocabulary& vocab, const Taxonomy& seed,
                      const std::vector<Term>& seed_terms, std::vector<nn::Tensor*> tensors) {
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, version);
  put_str(out, config_text);

  put_u64(out, static_cast<std::uint64_t>(vocab.size()));
  for (int i = 0; i < vocab.size(); ++i) put_str(out, vocab.token(i));

  put_u64(out, static_cast<std::uint64_t>(seed.node_count()));
  put_i32(out, seed.root());
  for (TermId n = 0; n < seed.node_count(); ++n) {
    put_i32(out, seed.parent(n));
    const auto& kids = seed.children(n);
    put_u64(out, kids.size());
    for (TermId c : kids) put_i32(out, c);
    put_str(out, seed_terms[static_cast<std::size_t>(n)].surface);
    put_str(out, seed_terms[static_cast<std::size_t>(n)].description);
  }

  put_u64(out, tensors.size());
  for (const nn::Tensor* t : tensors) {
    put_str(out, t->name);
    put_u32(out, static_cast<std::uint32_t>(t->rows()));
    put_u32(out, static_cast<std::uint32_t>(t->cols()));
    out.write(reinterpret_cast<const char*>(t->value.data()),
              static_cast<std::streamsize>(sizeof(double) * t->size()));
  }
  out.write(kFooter, sizeof(kFooter));
}

void save_checkpoint(const std::string& path, ScorerModel& model, const Taxonomy& seed,
                     const std::vector<Term>& seed_terms) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  write_checkpoint(out, kCheckpointVersion, run_config_to_string(model.cfg), model.vocab, seed,
                   seed_terms, model.tensors());
  if (!out) throw DataError("write failed for checkpoint: " + path);
}

LoadedCheckpoint read_checkpoint(std::istream& in, const std::string& source_name) {
  Reader r{in, source_name};
  char magic[8];
  r.raw(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) r.fail("bad magic");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion)
    throw DataError(source_name + ": checkpoint version " + std::to_string(version) +
                    ", this build reads version " + std::to_string(kCheckpointVersion));

  LoadedCheckpoint loaded;
  loaded.model.cfg = parse_run_config(r.str("config"), source_name + "(embedded config)");

  const std::uint64_t vocab_size = r.u64("vocab size");
  Vocabulary vocab;
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    std::string tok = r.str("vocab token");
    const int id = vocab.add(tok);
    if (id != static_cast<int>(i))
      r.fail("vocabulary token '" + tok + "' out of order or duplicated");
  }
  loaded.model.vocab = vocab;

  const std::uint64_t node_count = r.u64("node count");
  const TermId root = r.i32("root");
  std::vector<Edge> edges;
  loaded.seed_terms.resize(static_cast<std::size_t>(node_count));
  for (std::uint64_t n = 0; n < node_count; ++n) {
    (void)r.i32("parent");  // children lists carry the structure
    const std::uint64_t kid_count = r.u64("child count");
    for (std::uint64_t k = 0; k < kid_count; ++k)
      edges.push_back({static_cast<TermId>(n), r.i32("child")});
    Term& t = loaded.seed_terms[static_cast<std::size_t>(n)];
    t.id = static_cast<TermId>(n);
    t.surface = r.str("surface");
    t.description = r.str("description");
  }
  loaded.seed = Taxonomy::from_edges(static_cast<int>(node_count), edges, root);

  // Initialize parameter storage from the config, then overwrite values.
  Rng rng(0);
  loaded.model.pair.init(loaded.model.vocab.size(), loaded.model.cfg.d_model,
                         loaded.model.cfg.pair_len, rng);
  loaded.model.coherence.init(loaded.model.cfg, rng);
  std::unordered_map<std::string, nn::Tensor*> by_name;
  for (nn::Tensor* t : loaded.model.tensors()) by_name.emplace(t->name, t);

  const std::uint64_t tensor_count = r.u64("tensor count");
  if (tensor_count != by_name.size())
    r.fail("tensor count " + std::to_string(tensor_count) + ", expected " +
           std::to_string(by_name.size()));
  for (std::uint64_t i = 0; i < tensor_count; ++i) {
    std::string name = r.str("tensor name");
    auto it = by_name.find(name);
    if (it == by_name.end()) r.fail("unknown tensor '" + name + "'");
    nn::Tensor* t = it->second;
    const std::uint32_t rows = r.u32("tensor rows");
    const std::uint32_t cols = r.u32("tensor cols");
    if (rows != static_cast<std::uint32_t>(t->rows()) ||
        cols != static_cast<std::uint32_t>(t->cols()))
      throw DataError(source_name + ": tensor '" + name + "' has shape " + std::to_string(rows) +
                      "x" + std::to_string(cols) + ", config implies " + std::to_string(t->rows()) +
                      "x" + std::to_string(t->cols()));
    r.raw(t->value.data(), sizeof(double) * t->size(), "tensor data");
    if (!t->value.allFinite()) r.fail("non-finite values in tensor '" + name + "'");
  }

  char footer[8];
  r.raw(footer, sizeof(footer), "footer");
  if (std::memcmp(footer, kFooter, sizeof(kFooter)) != 0) r.fail("bad footer");
  return loaded;
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  return read_checkpoint(in, path);
}

}  // namespace taxo
