#include "sanid/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "sanid/error.hpp"

namespace sanid {
namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable random_embeddings(const Vocab& vocab, std::size_t dim, Rng& rng,
                                 bool frozen) {
  EmbeddingTable table{Tensor(vocab.size(), dim), frozen};
  for (std::size_t r = 1; r < vocab.size(); ++r) {
    for (double& x : table.matrix.row(r)) {
      x = rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
    }
  }
  return table;
}

EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                              std::size_t dim, Rng& rng, bool frozen) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open embedding file " + path.string());

  EmbeddingLoad load;
  load.table = random_embeddings(vocab, dim, rng, frozen);
  std::vector<bool> seen(vocab.size(), false);

  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto parts = fields(line);
    if (parts.empty()) continue;
    if (number == 1 && parts.size() == 2) {
      std::size_t count = 0, header_dim = 0;
      if (parse_number(parts[0], count) && parse_number(parts[1], header_dim)) {
        if (header_dim != dim) {
          fail(ErrorKind::kData, path.string() + ":1: header declares dimension " +
                                     std::to_string(header_dim) + ", expected " +
                                     std::to_string(dim));
        }
        continue;
      }
    }
    if (parts.size() != dim + 1) {
      fail(ErrorKind::kData, path.string() + ":" + std::to_string(number) + ": expected " +
                                 std::to_string(dim) + " values, found " +
                                 std::to_string(parts.size() - 1));
    }
    const auto id = vocab.find(parts[0]);
    if (!id || *id == kPadId || seen[*id]) continue;
    auto row = load.table.matrix.row(*id);
    for (std::size_t j = 0; j < dim; ++j) {
      double value = 0.0;
      if (!parse_number(parts[j + 1], value) || !std::isfinite(value)) {
        fail(ErrorKind::kData, path.string() + ":" + std::to_string(number) +
                                   ": bad value '" + std::string(parts[j + 1]) + "'");
      }
      row[j] = value;
    }
    seen[*id] = true;
    if (*id >= 2) ++load.found;
  }
  if (in.bad()) fail(ErrorKind::kIo, "error reading " + path.string());

  const std::size_t real = vocab.size() > 2 ? vocab.size() - 2 : 0;
  load.coverage = real == 0 ? 1.0 : static_cast<double>(load.found) / static_cast<double>(real);
  return load;
}

}  // namespace sanid
