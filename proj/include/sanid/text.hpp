#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sanid {

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

struct PreprocessOptions {
  bool lowercase = true;
};

// English cardinal words, space separated: 55 -> "fifty five",
// 1200 -> "one thousand two hundred". Valid for 0..999999.
std::string number_to_words(std::uint32_t n);

// Tokenizes an utterance:
//  * apostrophes are dropped ("don't" -> "dont"), every other ASCII
//    punctuation character acts as a separator;
//  * each maximal digit run becomes its cardinal words; runs longer than six
//    digits are spelled digit by digit;
//  * ASCII letters are lowercased when requested; other bytes pass through;
//  * a whitespace-delimited "<unk>" is kept verbatim.
// An input with no tokens left yields the single token "<unk>".
std::vector<std::string> preprocess(std::string_view text,
                                    const PreprocessOptions& options = {});

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace sanid
