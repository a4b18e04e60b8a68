#include <algorithm>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "sanid/dataset.hpp"
#include "sanid/synthetic.hpp"
#include "sanid/text.hpp"

#ifndef SANID_DATA_DIR
#error "SANID_DATA_DIR must point at the data directory"
#endif

namespace sanid {
namespace {

bool has_token(const std::vector<std::string>& tokens, const std::string& w) {
  return std::find(tokens.begin(), tokens.end(), w) != tokens.end();
}

TEST(SyntheticTest, ShapeAndKeywords) {
  const auto rows = generate_synthetic(2, 5, 42);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    const auto tokens = preprocess(r.text);
    const std::size_t intent = r.intent == synthetic_intent_name(0) ? 0 : 1;
    EXPECT_EQ(r.intent, synthetic_intent_name(intent));
    const auto kws = synthetic_keywords(intent);
    EXPECT_TRUE(std::any_of(kws.begin(), kws.end(),
                            [&](const std::string& k) { return has_token(tokens, k); }))
        << r.text;
  }
}

TEST(SyntheticTest, Deterministic) {
  EXPECT_EQ(generate_synthetic(6, 20, 3), generate_synthetic(6, 20, 3));
  EXPECT_NE(generate_synthetic(6, 20, 3), generate_synthetic(6, 20, 4));
}

TEST(SyntheticTest, IntentNamesAndKeywordsAreDistinct) {
  std::set<std::string> names, words;
  std::size_t total = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    names.insert(synthetic_intent_name(i));
    for (const auto& k : synthetic_keywords(i)) {
      words.insert(k);
      ++total;
    }
  }
  EXPECT_EQ(names.size(), 12u);
  EXPECT_EQ(words.size(), total);
  EXPECT_EQ(synthetic_intent_name(0), "DecreaseBrightness");
  EXPECT_EQ(synthetic_intent_name(5), "SwitchLightOn");
}

// A keyword lookup classifies the corpus perfectly, so the task is learnable.
TEST(SyntheticTest, KeywordOracleIsPerfect) {
  const auto rows = generate_synthetic(6, 100, kSyntheticSeed);
  std::size_t correct = 0;
  for (const auto& r : rows) {
    const auto tokens = preprocess(r.text);
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < 6; ++i)
      for (const auto& k : synthetic_keywords(i))
        if (has_token(tokens, k)) hits.push_back(i);
    if (hits.size() == 1 && synthetic_intent_name(hits[0]) == r.intent) ++correct;
  }
  EXPECT_EQ(correct, rows.size());
}

TEST(SyntheticTest, CommittedCorpusMatchesGenerator) {
  const auto committed = read_jsonl(std::string(SANID_DATA_DIR) + "/synthetic_6x100.jsonl");
  EXPECT_EQ(committed, generate_synthetic(6, 100, kSyntheticSeed));
  const auto counts = intent_counts(committed);
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& c : counts) EXPECT_EQ(c.count, 100u);
}

}  // namespace
}  // namespace sanid
