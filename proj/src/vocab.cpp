#include "sanid/vocab.hpp"

#include <algorithm>

#include "sanid/error.hpp"
#include "sanid/text.hpp"

namespace sanid {

Vocab::Vocab() {
  add(kPadToken);
  add(kUnkToken);
}

TokenId Vocab::add(std::string_view token) {
  if (auto existing = find(token)) return *existing;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::id(std::string_view token) const {
  return find(token).value_or(kUnkId);
}

const std::string& Vocab::token(TokenId id) const {
  if (id >= tokens_.size()) {
    fail(ErrorKind::kIndex, "token id " + std::to_string(id) + " outside vocabulary of " +
                                std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

std::vector<TokenId> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocab::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId i : ids) out.push_back(token(i));
  return out;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    fail(ErrorKind::kData, "vocabulary must start with " + std::string(kPadToken) + " and " +
                               std::string(kUnkToken));
  }
  Vocab v;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) fail(ErrorKind::kData, "duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) fail(ErrorKind::kData, "duplicate intent label '" + names_[i] + "'");
    }
  }
}

LabelSet LabelSet::from_names(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return LabelSet(std::move(names));
}

std::optional<std::uint32_t> LabelSet::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - names_.begin());
}

}  // namespace sanid
