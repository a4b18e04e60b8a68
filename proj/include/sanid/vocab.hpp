#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sanid/layers.hpp"

namespace sanid {

// Token <-> id bijection. Id 0 is PAD and id 1 is UNK; every other token
// gets the next dense id in insertion order.
class Vocab {
 public:
  Vocab();

  TokenId add(std::string_view token);
  // UNK for unknown tokens.
  TokenId id(std::string_view token) const;
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::string& token(TokenId id) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  // Rebuilds from an id-ordered token list whose first two entries are the
  // reserved tokens.
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Ordered intent label list; ids are positions.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> names);

  // Sorted, de-duplicated labels.
  static LabelSet from_names(std::vector<std::string> names);

  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace sanid
