#include "sanid/text.hpp"

#include <array>

#include "sanid/error.hpp"

namespace sanid {
namespace {

constexpr std::array<const char*, 20> kSmall = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};

constexpr std::array<const char*, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

constexpr std::size_t kMaxWordDigits = 6;

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

// Words for 1..999.
void append_hundreds(std::uint32_t n, std::string& out) {
  auto push = [&out](const char* w) {
    if (!out.empty()) out += ' ';
    out += w;
  };
  if (n >= 100) {
    push(kSmall[n / 100]);
    push("hundred");
    n %= 100;
  }
  if (n >= 20) {
    push(kTens[n / 10]);
    n %= 10;
    if (n) push(kSmall[n]);
  } else if (n > 0) {
    push(kSmall[n]);
  }
}

void append_digit_run(std::string_view digits, std::string& buffer) {
  buffer += ' ';
  if (digits.size() > kMaxWordDigits) {
    for (char d : digits) {
      buffer += kSmall[static_cast<std::size_t>(d - '0')];
      buffer += ' ';
    }
    return;
  }
  std::uint32_t value = 0;
  for (char d : digits) value = value * 10 + static_cast<std::uint32_t>(d - '0');
  buffer += number_to_words(value);
  buffer += ' ';
}

void split_into(std::string_view buffer, std::vector<std::string>& tokens) {
  std::size_t i = 0;
  while (i < buffer.size()) {
    while (i < buffer.size() && is_space(static_cast<unsigned char>(buffer[i]))) ++i;
    std::size_t j = i;
    while (j < buffer.size() && !is_space(static_cast<unsigned char>(buffer[j]))) ++j;
    if (j > i) tokens.emplace_back(buffer.substr(i, j - i));
    i = j;
  }
}

}  // namespace

std::string number_to_words(std::uint32_t n) {
  if (n > 999999) {
    fail(ErrorKind::kPrecondition, "number_to_words supports 0..999999, got " + std::to_string(n));
  }
  if (n == 0) return kSmall[0];
  std::string out;
  if (n >= 1000) {
    append_hundreds(n / 1000, out);
    out += " thousand";
    n %= 1000;
  }
  append_hundreds(n, out);
  return out;
}

std::vector<std::string> preprocess(std::string_view text,
                                    const PreprocessOptions& options) {
  std::vector<std::string> words;
  split_into(text, words);

  std::vector<std::string> tokens;
  std::string buffer;
  for (const std::string& word : words) {
    if (word == kUnkToken) {
      tokens.push_back(word);
      continue;
    }
    buffer.clear();
    for (std::size_t i = 0; i < word.size();) {
      const auto c = static_cast<unsigned char>(word[i]);
      if (is_digit(c)) {
        std::size_t j = i;
        while (j < word.size() && is_digit(static_cast<unsigned char>(word[j]))) ++j;
        append_digit_run(std::string_view(word).substr(i, j - i), buffer);
        i = j;
        continue;
      }
      if (c == '\'') {
        // dropped so contractions stay one token
      } else if (is_ascii_punct(c)) {
        buffer += ' ';
      } else if (options.lowercase && c >= 'A' && c <= 'Z') {
        buffer += static_cast<char>(c - 'A' + 'a');
      } else {
        buffer += static_cast<char>(c);
      }
      ++i;
    }
    split_into(buffer, tokens);
  }
  if (tokens.empty()) tokens.emplace_back(kUnkToken);
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace sanid
