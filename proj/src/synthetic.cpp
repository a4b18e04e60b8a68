#include "sanid/synthetic.hpp"

#include <array>

#include "sanid/error.hpp"
#include "sanid/rng.hpp"

namespace sanid {
namespace {

struct IntentTemplate {
  const char* name;
  std::array<const char*, 4> keywords;
};

constexpr std::array<IntentTemplate, 6> kLightIntents = {{
    {"DecreaseBrightness", {"dim", "darker", "lower", "decrease"}},
    {"IncreaseBrightness", {"brighten", "brighter", "raise", "increase"}},
    {"SetLightBrightness", {"brightness", "percent", "level", "intensity"}},
    {"SetLightColor", {"color", "red", "blue", "green"}},
    {"SwitchLightOff", {"off", "disable", "kill", "extinguish"}},
    {"SwitchLightOn", {"on", "enable", "activate", "illuminate"}},
}};

constexpr std::array<const char*, 8> kPrefixes = {
    "", "please", "could you", "can you", "i want you to", "hey", "go ahead and", "would you"};
constexpr std::array<const char*, 6> kVerbs = {"turn", "make", "set", "switch", "get", "put"};
constexpr std::array<const char*, 8> kRooms = {"kitchen", "bedroom", "living room", "garage",
                                               "hallway", "bathroom", "office", "basement"};
constexpr std::array<const char*, 4> kLights = {"lights", "light", "lamp", "lamps"};
constexpr std::array<const char*, 8> kSuffixes = {
    "", "now", "please", "right away", "for me", "thanks", "in 5 minutes", "at 10"};
constexpr std::array<const char*, 3> kEndings = {".", "?", "!"};

template <typename Array>
const char* pick(const Array& options, Rng& rng) {
  return options[rng.below(options.size())];
}

// Letters-only pseudo word so keywords survive preprocessing unchanged.
std::string letters(std::size_t n) {
  std::string out;
  do {
    out.insert(out.begin(), static_cast<char>('a' + n % 26));
    n /= 26;
  } while (n > 0);
  return out;
}

}  // namespace

std::string synthetic_intent_name(std::size_t intent) {
  if (intent < kLightIntents.size()) return kLightIntents[intent].name;
  std::string digits = std::to_string(intent + 1);
  if (digits.size() < 2) digits.insert(digits.begin(), '0');
  return "Intent" + digits;
}

std::vector<std::string> synthetic_keywords(std::size_t intent) {
  if (intent < kLightIntents.size()) {
    const auto& kw = kLightIntents[intent].keywords;
    return {kw.begin(), kw.end()};
  }
  const std::string stem = "zq" + letters(intent);
  return {stem + "a", stem + "e", stem + "o", stem + "u"};
}

std::vector<RawUtterance> generate_synthetic(std::size_t intents, std::size_t per_intent,
                                             std::uint64_t seed) {
  if (intents < 2) fail(ErrorKind::kPrecondition, "synthetic corpus needs at least 2 intents");
  Rng rng(seed);
  std::vector<RawUtterance> rows;
  rows.reserve(intents * per_intent);
  for (std::size_t intent = 0; intent < intents; ++intent) {
    const auto keywords = synthetic_keywords(intent);
    const std::string name = synthetic_intent_name(intent);
    for (std::size_t n = 0; n < per_intent; ++n) {
      std::vector<std::string> words;
      if (const std::string prefix = pick(kPrefixes, rng); !prefix.empty()) words.push_back(prefix);
      if (rng.below(2) == 0) words.push_back(pick(kVerbs, rng));
      words.push_back("the");
      words.push_back(pick(kRooms, rng));
      words.push_back(pick(kLights, rng));
      const std::size_t at = static_cast<std::size_t>(rng.below(words.size() + 1));
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                   keywords[rng.below(keywords.size())]);
      if (const std::string suffix = pick(kSuffixes, rng); !suffix.empty()) words.push_back(suffix);

      std::string text;
      for (const auto& w : words) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      text[0] = static_cast<char>(text[0] - 'a' + 'A');
      text += pick(kEndings, rng);
      rows.push_back({std::move(text), name});
    }
  }
  return rows;
}

}  // namespace sanid
