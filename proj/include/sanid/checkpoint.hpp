#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sanid/model.hpp"
#include "sanid/training.hpp"
#include "sanid/vocab.hpp"

namespace sanid {

// Binary container, all integers little-endian:
//
//   magic        8 bytes  "SANIDCKP"
//   version      u32      kCheckpointVersion
//   metadata     u64 length + UTF-8 text:
//                  [config]  key = value lines (TrainConfig)
//                  [vocab]   one token per line, id order
//                  [labels]  one intent per line, id order
//   arrays       u32 count, then per array:
//                  u32 name length, name bytes, u8 frozen, u32 rank,
//                  u64 per dimension, IEEE-754 binary64 values
//   checksum     u64 FNV-1a over every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  Vocab vocab;
  LabelSet labels;
  ModelParams params;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
// Throws kCheckpoint on truncation, corruption, unknown version, or arrays
// that do not match the declared architecture (or `expected` when given).
Checkpoint deserialize_checkpoint(const std::string& bytes,
                                  std::optional<Architecture> expected = std::nullopt);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<Architecture> expected = std::nullopt);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace sanid
