#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "taxo/scorer.hpp"

namespace taxo {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything needed to run inference later: resolved config, vocabulary,
// the seed taxonomy with its term table, and all parameter tensors with
// raw (bit-exact) doubles.
struct LoadedCheckpoint {
  ScorerModel model;
  Taxonomy seed;
  std::vector<Term> seed_terms;
};

void save_checkpoint(const std::string& path, ScorerModel& model, const Taxonomy& seed,
                     const std::vector<Term>& seed_terms);
LoadedCheckpoint load_checkpoint(const std::string& path);

// Stream-level variants; the version and config arguments let tests write
// deliberately inconsistent files.
void write_checkpoint(std::ostream& out, std::uint32_t version, const std::string& config_text,
                      const Vocabulary& vocab, const Taxonomy& seed,
                      const std::vector<Term>& seed_terms, std::vector<nn::Tensor*> tensors);
LoadedCheckpoint read_checkpoint(std::istream& in, const std::string& source_name);

}  // namespace taxo
