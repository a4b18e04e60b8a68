#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sanid/dataset.hpp"

namespace sanid {

// Seed of the committed data/synthetic_6x100.jsonl fixture.
inline constexpr std::uint64_t kSyntheticSeed = 1771;

// Intent names: the six smart-lights intents first, then Intent07, ...
std::string synthetic_intent_name(std::size_t intent);

// Keywords (already in preprocessed form) that identify an intent. No
// keyword belongs to two intents and none is a filler word.
std::vector<std::string> synthetic_keywords(std::size_t intent);

// `per_intent` templated utterances for each of `intents` intents, intent by
// intent. Each mixes shared filler words (prefixes, rooms, numbers) with one
// keyword of its own intent at a random position.
std::vector<RawUtterance> generate_synthetic(std::size_t intents, std::size_t per_intent,
                                             std::uint64_t seed);

}  // namespace sanid
