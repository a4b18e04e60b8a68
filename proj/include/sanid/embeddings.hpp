#pragma once

#include <cstddef>
#include <filesystem>

#include "sanid/layers.hpp"
#include "sanid/rng.hpp"
#include "sanid/vocab.hpp"

namespace sanid {

inline constexpr double kEmbeddingInitRange = 0.05;

struct EmbeddingLoad {
  EmbeddingTable table;
  std::size_t found = 0;   // vocabulary tokens (ids >= 2) present in the file
  double coverage = 0.0;   // found / (vocab size - 2)
};

// Every non-PAD row drawn uniform in [-0.05, 0.05] in id order; PAD is zero.
EmbeddingTable random_embeddings(const Vocab& vocab, std::size_t dim, Rng& rng,
                                 bool frozen = false);

// Reads word2vec/fastText text vectors: an optional "count dim" header line,
// then `token v1 ... v_dim` per line. Rows for vocabulary tokens found in the
// file are copied exactly; the others keep their random_embeddings() draw, so
// they are reproducible from the seed regardless of file contents. When a
// token appears twice the first line wins.
EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                              std::size_t dim, Rng& rng, bool frozen = true);

}  // namespace sanid
