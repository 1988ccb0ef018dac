// Copyright 2026 The ELG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "elg/error.hpp"
#include "elg/pairstats.hpp"
#include "oracles.hpp"

namespace elg {
namespace {

using testing::occ;

const std::string A = "tom|order|food";
const std::string B = "tom|eat|food";
const std::string C = "waiter|bring|bill";

PairCounts counts_of(std::vector<DocumentEvents> docs, int window = 5) {
  CountOptions o;
  o.window_sentences = window;
  return count_pairs(docs, o);
}

TEST(Count, AdjacentPair) {
  auto c = counts_of({{"d", {occ(A, "d", 1), occ(B, "d", 2)}}});
  EXPECT_EQ(c.before(A, B), 1);
  EXPECT_EQ(c.before(B, A), 0);
  EXPECT_EQ(c.together(A, B), 1);
}

TEST(Count, BothOrders) {
  auto c = counts_of({{"d1", {occ(A, "d1", 1), occ(B, "d1", 2)}},
                      {"d2", {occ(B, "d2", 1), occ(A, "d2", 2)}}});
  EXPECT_EQ(c.together(A, B), 2);
  EXPECT_EQ(c.before(A, B), 1);
  EXPECT_EQ(c.before(B, A), 1);
}

TEST(Count, WindowBoundary) {
  EXPECT_FALSE(counts_of({{"d", {occ(A, "d", 1), occ(B, "d", 7)}}}).has_pair(A, B));
  EXPECT_TRUE(counts_of({{"d", {occ(A, "d", 1), occ(B, "d", 6)}}}).has_pair(A, B));
  EXPECT_TRUE(counts_of({{"d", {occ(A, "d", 3, 1), occ(B, "d", 3, 4)}}}, 0).has_pair(A, B));
}

TEST(Count, OneToOneMatching) {
  // A A B: only the nearer A pairs with B.
  auto c = counts_of({{"d", {occ(A, "d", 1), occ(A, "d", 2), occ(B, "d", 3)}}});
  EXPECT_EQ(c.before(A, B), 1);
  EXPECT_EQ(c.event_count(A), 2);
  EXPECT_LE(c.before(A, B), c.event_count(A));
  // A B B: the second B has no unmatched A left.
  auto d = counts_of({{"d", {occ(A, "d", 1), occ(B, "d", 2), occ(B, "d", 3)}}});
  EXPECT_EQ(d.before(A, B), 1);
  EXPECT_EQ(d.n_pairs(), 1);
}

TEST(Count, ArgumentTallies) {
  auto c = counts_of({{"d", {occ(A, "d", 1), occ(B, "d", 2), occ(C, "d", 3)}}});
  EXPECT_EQ(c.verb_count("order"), 1);
  EXPECT_EQ(c.object_count("food"), 2);
  EXPECT_EQ(c.verb_verb("order", "eat"), 1);
  EXPECT_EQ(c.verb_verb("eat", "order"), 1);
  EXPECT_EQ(c.verb_object("order", "food"), 1);  // order ... eat food
  EXPECT_EQ(c.verb_object("bring", "food"), 2);
  EXPECT_EQ(c.object_object("food", "food"), 1);
  EXPECT_EQ(c.object_object("bill", "food"), 2);
}

std::vector<DocumentEvents> random_docs(std::mt19937_64& rng, int n_docs, int n_keys, int len) {
  std::vector<DocumentEvents> docs;
  for (int d = 0; d < n_docs; ++d) {
    DocumentEvents de{"d" + std::to_string(d), {}};
    int sent = 1;
    for (int i = 0; i < len; ++i) {
      sent += static_cast<int>(rng() % 3);
      int pred = 1 + static_cast<int>(rng() % 3) * 4;
      std::string key = "s" + std::to_string(rng() % n_keys) + "|v" + std::to_string(rng() % 3) + "|o";
      bool clash = false;
      for (const auto& o : de.events) clash |= o.sent_index == sent && o.predicate_index == pred;
      if (!clash) de.events.push_back(occ(key, de.doc_id, sent, pred));
    }
    std::sort(de.events.begin(), de.events.end(), [](const auto& x, const auto& y) {
      return std::tie(x.sent_index, x.predicate_index) < std::tie(y.sent_index, y.predicate_index);
    });
    docs.push_back(de);
  }
  return docs;
}

TEST(Count, AgreesWithBruteForceRecount) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto docs = random_docs(rng, 4, 5, 25);
    const int window = static_cast<int>(rng() % 6);
    PairCounts c = counts_of(docs, window);
    auto oracle = testing::brute_force_recount(docs, window);
    EXPECT_EQ(c.n_events(), oracle.n_events);
    for (const auto& [k, f] : oracle.freq) EXPECT_EQ(c.event_count(k), f);
    for (const auto& [pair, _] : c.pairs()) {
      EXPECT_EQ(c.before(pair.first, pair.second), oracle.t2(pair.first, pair.second));
      EXPECT_EQ(c.before(pair.second, pair.first), oracle.t2(pair.second, pair.first));
    }
    for (const auto& [ab, n] : oracle.before) EXPECT_EQ(c.before(ab.first, ab.second), n);
  }
}

TEST(Count, PairInvariantsHoldEverywhere) {
  std::mt19937_64 rng(4);
  auto docs = random_docs(rng, 10, 6, 40);
  PairCounts c = counts_of(docs);
  for (const auto& [pair, dir] : c.pairs()) {
    const auto& [a, b] = pair;
    EXPECT_EQ(c.together(a, b), dir.first + dir.second);
    EXPECT_GE(dir.first, 0);
    EXPECT_GE(dir.second, 0);
    EXPECT_LE(c.together(a, b), std::min(c.event_count(a), c.event_count(b)));
    EXPECT_LE(c.before(a, b), c.event_count(a));
  }
}

TEST(Count, MergeIsAssociative) {
  std::mt19937_64 rng(8);
  auto docs = random_docs(rng, 9, 5, 20);
  std::vector<DocumentEvents> x(docs.begin(), docs.begin() + 4), y(docs.begin() + 4, docs.end());
  PairCounts whole = counts_of(docs);
  PairCounts parts = counts_of(x);
  parts.merge(counts_of(y));
  EXPECT_TRUE(parts == whole);
  PairCounts other = counts_of(y);
  other.merge(counts_of(x));
  EXPECT_TRUE(other == whole);
}

TEST(Count, SerializeRoundTrip) {
  std::mt19937_64 rng(2);
  PairCounts c = counts_of(random_docs(rng, 5, 6, 20));
  c.add_tokens(1234);
  std::string text = c.serialize();
  PairCounts back = PairCounts::parse(text);
  EXPECT_TRUE(back == c);
  EXPECT_EQ(back.serialize(), text);
  std::string broken = text;
  broken.replace(broken.find("[PAIRS]"), 7, "[PAIRZ]");
  EXPECT_THROW(PairCounts::parse(broken), DataError);
}

TEST(Pmi, Anchors) {
  EXPECT_NEAR(pmi(10, 10, 10, 10), std::log(11.0 * 10 / 121), 1e-12);
  EXPECT_EQ(pmi(10, 10, 10, 10, 0.0), 0.0);
  EXPECT_EQ(pmi(50, 50, 25, 100, 0.0), 0.0);
  const double guarded = pmi(50, 70, 0, 100);
  EXPECT_TRUE(std::isfinite(guarded));
  EXPECT_LT(guarded, 0.0);
  EXPECT_EQ(pmi(3, 8, 2, 40), pmi(8, 3, 2, 40));
  EXPECT_THROW(pmi(1, 1, 1, 0), DataError);
}

TEST(Transition, Arithmetic) {
  PairCounts c;
  for (int i = 0; i < 6; ++i) c.add_occurrence(A);
  for (int i = 0; i < 3; ++i) c.add_occurrence(B);
  c.add_occurrence(C);
  for (int i = 0; i < 3; ++i) c.add_match(A, B);
  EXPECT_EQ(transition_probability(A, B, c), 0.5);
  EXPECT_EQ(transition_probability(A, C, c), 0.0);
  EXPECT_EQ(transition_probability(B, A, c), 0.0);
  EXPECT_THROW(transition_probability("x|y|z", A, c), NotFoundError);
}

TEST(Transition, BoundedAndMonotone) {
  std::mt19937_64 rng(13);
  PairCounts c = counts_of(random_docs(rng, 8, 5, 30));
  for (const auto& [a, fa] : c.events()) {
    for (const auto& [b, _] : c.events()) {
      const double p = transition_probability(a, b, c);
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
  PairCounts d;
  for (int i = 0; i < 4; ++i) d.add_occurrence(A);
  double last = -1;
  for (int i = 0; i < 4; ++i) {
    d.add_match(A, B);
    const double p = transition_probability(A, B, d);
    EXPECT_GE(p, last);
    last = p;
  }
}

struct FeatureFixture {
  PairCounts counts;
  ContextIndex contexts;
  EmbeddingTable table;
  ParsedCorpus corpus;
};

FeatureFixture feature_fixture() {
  FeatureFixture f;
  f.corpus = load_corpus(testing::data_dir() / "restaurant.conllu", CorpusFormat::kConllu);
  auto docs = extract_corpus_events(f.corpus);
  f.counts = count_pairs(docs, {}, &f.corpus, &f.contexts);
  std::vector<std::string> words{"the", "customer", "waiter", "food", "menu", "order", "eat"};
  Eigen::MatrixXf v(static_cast<Eigen::Index>(words.size()), 3);
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    v.row(i) << static_cast<float>(i), 1.0f, static_cast<float>(i % 2);
  f.table = EmbeddingTable(words, v);
  return f;
}

TEST(Features, RatioExamples) {
  PairCounts c;
  for (int i = 0; i < 4; ++i) {
    c.add_occurrence(A);
    c.add_occurrence(B);
  }
  for (int i = 0; i < 3; ++i) c.add_match(A, B);
  c.add_match(B, A);
  EmbeddingTable empty({"x"}, Eigen::MatrixXf::Zero(1, 2));
  FeatureVector fv = build_feature_vector(A, B, c, {}, empty);
  EXPECT_EQ(fv.group(FeatureGroup::kFrequency)[0], 4.0);
  EXPECT_EQ(fv.group(FeatureGroup::kRatio)[0], 0.75);
  // object "food" is absent for C's counterpart: R with t7/t9 denominators.
  PairCounts z;
  z.add_occurrence("|go|");
  z.add_occurrence("|stay|");
  z.add_match("|go|", "|stay|");
  FeatureVector zf = build_feature_vector("|go|", "|stay|", z, {}, empty);
  EXPECT_EQ(zf.group(FeatureGroup::kRatio)[4], 0.0);  // t1 / t7, t7 = 0
  EXPECT_TRUE(zf.values.allFinite());
}

TEST(Features, AbsentPairIsRejected) {
  PairCounts c;
  c.add_occurrence(A);
  EXPECT_THROW(build_feature_vector(A, B, c, {}, EmbeddingTable{}), NotFoundError);
}

TEST(Features, MatchBruteForceOnFixture) {
  FeatureFixture f = feature_fixture();
  auto docs = extract_corpus_events(f.corpus);
  auto oracle = testing::brute_force_recount(docs, CountOptions{}.window_sentences);
  FeatureOptions opt;
  std::size_t checked = 0;
  for (const auto& [pair, _] : f.counts.pairs()) {
    for (bool flip : {false, true}) {
      const std::string& a = flip ? pair.second : pair.first;
      const std::string& b = flip ? pair.first : pair.second;
      FeatureVector fv = build_feature_vector(a, b, f.counts, f.contexts.at(pair), f.table, opt);
      Eigen::VectorXd want =
          testing::brute_force_features(a, b, oracle, f.corpus, f.table, opt.pos_inventory);
      ASSERT_EQ(fv.values.size(), want.size());
      EXPECT_LE((fv.values - want).cwiseAbs().maxCoeff(), 1e-9) << a << " / " << b;
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(Features, MaskingTouchesOnlyItsGroup) {
  FeatureFixture f = feature_fixture();
  const auto& [pair, ctx] = *f.contexts.begin();
  FeatureVector fv = build_feature_vector(pair.first, pair.second, f.counts, ctx, f.table);
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    GroupMask mask = kAllGroups & ~group_bit(static_cast<FeatureGroup>(g));
    FeatureVector m = mask_groups(fv, mask);
    for (int h = 0; h < kFeatureGroupCount; ++h) {
      auto grp = static_cast<FeatureGroup>(h);
      if (h == g) {
        EXPECT_EQ(m.group(grp).cwiseAbs().sum(), 0.0);
      } else {
        EXPECT_EQ(m.group(grp), fv.group(grp));
      }
    }
  }
  EXPECT_EQ(fv.layout.columns(kAllGroups).size(), static_cast<std::size_t>(fv.layout.size()));
  EXPECT_EQ(mask_name(group_bit(FeatureGroup::kFrequency) | group_bit(FeatureGroup::kPmi)),
            "frequency+pmi");
}

TEST(Features, ContextsRecordInterveningTokens) {
  ParsedCorpus c;
  c.documents.push_back(
      {"d",
       {testing::make_sentence("d", 1,
                               {{"Tom", "tom", "PROPN", 2, "nsubj"},
                                {"ordered", "order", "VERB", 0, "root"},
                                {"food", "food", "NOUN", 2, "obj"},
                                {"quickly", "quickly", "ADV", 2, "advmod"}}),
        testing::make_sentence("d", 2,
                               {{"Then", "then", "ADV", 3, "advmod"},
                                {"Tom", "tom", "PROPN", 3, "nsubj"},
                                {"ate", "eat", "VERB", 0, "root"},
                                {"food", "food", "NOUN", 3, "obj"}})}});
  auto docs = extract_corpus_events(c);
  ContextIndex ctx;
  count_pairs(docs, {}, &c, &ctx);
  ASSERT_EQ(ctx.size(), 1u);
  const auto& only = ctx.begin()->second.at(0);
  EXPECT_EQ(only.earlier, "tom|order|food");
  EXPECT_EQ(only.later, "tom|eat|food");
  EXPECT_EQ(only.lemmas, (std::vector<std::string>{"quickly", "then"}));
  EXPECT_EQ(only.pos, (std::vector<std::string>{"ADV", "ADV"}));
}

}  // namespace
}  // namespace elg
