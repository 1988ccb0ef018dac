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

#include "elg/error.hpp"
#include "elg/events.hpp"
#include "oracles.hpp"

namespace elg {
namespace {

using testing::make_sentence;
using testing::occ;

ParsedSentence tom_paid_and_left() {
  return make_sentence("d", 1,
                       {{"Tom", "Tom", "PROPN", 2, "nsubj"},
                        {"paid", "pay", "VERB", 0, "root"},
                        {"the", "the", "DET", 4, "det"},
                        {"bill", "bill", "NOUN", 2, "obj"},
                        {"and", "and", "CCONJ", 6, "cc"},
                        {"left", "leave", "VERB", 2, "conj"},
                        {"the", "the", "DET", 8, "det"},
                        {"restaurant", "restaurant", "NOUN", 6, "obj"},
                        {".", ".", "PUNCT", 2, "punct"}});
}

std::vector<std::string> keys(const std::vector<EventOccurrence>& v) {
  std::vector<std::string> out;
  for (const auto& o : v) out.push_back(o.event);
  return out;
}

TEST(EventTuple, KeyRoundTrip) {
  EventTuple t{{"ocean"}, {"give", "up"}, {}};
  EXPECT_EQ(t.key(), "ocean|give_up|");
  EXPECT_EQ(EventTuple::from_key(t.key()), t);
  EXPECT_EQ(t.predicate_key(), "give_up");
  EXPECT_EQ(t.object_key(), "");
}

TEST(Extract, SingleClause) {
  auto s = make_sentence("d", 1,
                         {{"Tom", "Tom", "PROPN", 2, "nsubj"},
                          {"paid", "pay", "VERB", 0, "root"},
                          {"the", "the", "DET", 4, "det"},
                          {"bill", "bill", "NOUN", 2, "obj"}});
  auto ev = extract_events(s);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].event, "tom|pay|bill");
  EXPECT_EQ(ev[0].predicate_index, 2);
  EXPECT_LE(ev[0].span_start, ev[0].span_end);
}

TEST(Extract, ConjunctionInheritsSubject) {
  EXPECT_EQ(keys(extract_events(tom_paid_and_left())),
            (std::vector<std::string>{"tom|pay|bill", "tom|leave|restaurant"}));
}

TEST(Extract, CopulaOnlySentenceHasNoEvents) {
  auto s = make_sentence("d", 1,
                         {{"Tom", "Tom", "PROPN", 3, "nsubj"},
                          {"is", "be", "AUX", 3, "cop"},
                          {"happy", "happy", "ADJ", 0, "root"}});
  EXPECT_TRUE(extract_events(s).empty());
}

TEST(Extract, BareSingleVerbIsDroppedButCompoundTriggerKept) {
  auto bare = make_sentence("d", 1, {{"Run", "run", "VERB", 0, "root"}, {"!", "!", "PUNCT", 1, "punct"}});
  EXPECT_TRUE(extract_events(bare).empty());
  auto prt = make_sentence("d", 1, {{"Give", "give", "VERB", 0, "root"}, {"up", "up", "ADP", 1, "compound:prt"}});
  EXPECT_EQ(keys(extract_events(prt)), (std::vector<std::string>{"|give_up|"}));
}

TEST(Extract, LtpStyleLabelsViaOptions) {
  auto s = make_sentence("d", 1,
                         {{"他", "他", "r", 2, "SBV"}, {"吃", "吃", "v", 0, "HED"}, {"饭", "饭", "n", 2, "VOB"}});
  EXPECT_EQ(keys(extract_events(s)), (std::vector<std::string>{"他|吃|饭"}));
}

TEST(Extract, CompoundArgumentsAndDeterminism) {
  auto s = make_sentence("d", 1,
                         {{"ocean", "ocean", "NOUN", 2, "compound"},
                          {"pollution", "pollution", "NOUN", 3, "nsubj"},
                          {"spreads", "spread", "VERB", 0, "root"}});
  auto a = extract_events(s);
  EXPECT_EQ(keys(a), (std::vector<std::string>{"ocean_pollution|spread|"}));
  EXPECT_EQ(a, extract_events(s));
}

TEST(Extract, FixtureEventsAreSlotComplete) {
  ParsedCorpus c = load_corpus(testing::data_dir() / "restaurant.conllu", CorpusFormat::kConllu);
  auto docs = extract_corpus_events(c);
  std::size_t n = 0;
  for (const auto& d : docs) {
    for (std::size_t i = 0; i < d.events.size(); ++i) {
      const auto& o = d.events[i];
      EventTuple t = EventTuple::from_key(o.event);
      ASSERT_FALSE(t.predicate.empty());
      if (t.subject.empty() && t.object.empty()) EXPECT_GE(t.predicate.size(), 2u);
      if (i > 0) {
        const auto& p = d.events[i - 1];
        EXPECT_TRUE(std::tie(p.sent_index, p.predicate_index) <
                    std::tie(o.sent_index, o.predicate_index));
      }
      ++n;
    }
  }
  EXPECT_GT(n, 150u);
}

TEST(Filter, LowFrequency) {
  std::vector<EventOccurrence> in;
  for (int i = 0; i < 5; ++i) in.push_back(occ("a|x|", "d", i + 1));
  in.push_back(occ("b|x|", "d", 9));
  auto out = filter_low_frequency(in, 2);
  EXPECT_EQ(out.size(), 5u);
  for (const auto& o : out) EXPECT_EQ(o.event, "a|x|");
  EXPECT_EQ(filter_low_frequency(in, 1), in);
  EXPECT_TRUE(filter_low_frequency(std::vector<EventOccurrence>{}, 3).empty());
}

TEST(Filter, LowFrequencyIsMonotone) {
  std::vector<EventOccurrence> in;
  for (int k = 1; k <= 6; ++k)
    for (int i = 0; i < k; ++i) in.push_back(occ("e" + std::to_string(k) + "|x|", "d", i + 1));
  for (std::size_t t1 = 1; t1 <= 7; ++t1) {
    auto loose = filter_low_frequency(in, t1);
    for (std::size_t t2 = t1; t2 <= 7; ++t2) {
      for (const auto& o : filter_low_frequency(in, t2))
        EXPECT_NE(std::find(loose.begin(), loose.end(), o), loose.end());
    }
  }
}

TEST(Filter, GeneralityBlacklist) {
  std::vector<EventOccurrence> in{occ("|do|thing", "d", 1), occ("tom|pay|bill", "d", 2),
                                  occ("we|go|somewhere", "d", 3)};
  auto by_key = GeneralityBlacklist::parse("# c\nkey:|do|thing\n");
  EXPECT_EQ(keys(filter_general(in, by_key)),
            (std::vector<std::string>{"tom|pay|bill", "we|go|somewhere"}));
  auto by_pred = GeneralityBlacklist::parse("pred:do\npred:go\n");
  EXPECT_EQ(keys(filter_general(in, by_pred)), (std::vector<std::string>{"tom|pay|bill"}));
  auto by_re = GeneralityBlacklist::parse("re:\\|somewhere$\n");
  EXPECT_EQ(keys(filter_general(in, by_re)), (std::vector<std::string>{"|do|thing", "tom|pay|bill"}));
  EXPECT_EQ(filter_general(in, GeneralityBlacklist{}), in);
}

TEST(Filter, MalformedBlacklistFailsAtLoad) {
  EXPECT_THROW(GeneralityBlacklist::parse("re:([unclosed\n"), ConfigError);
  EXPECT_THROW(GeneralityBlacklist::parse("do\n"), ConfigError);
}

TEST(Filter, ShippedBlacklistLoads) {
  auto bl = GeneralityBlacklist::load(testing::source_dir() / "data" / "generality_blacklist.txt");
  EXPECT_TRUE(bl.matches("we|do|thing"));
  EXPECT_TRUE(bl.matches("it|rain|"));
  EXPECT_FALSE(bl.matches("customer|pay|bill"));
}

TEST(Events, SerializeRoundTrip) {
  ParsedCorpus c = load_corpus(testing::data_dir() / "restaurant.conllu", CorpusFormat::kConllu);
  auto docs = extract_corpus_events(c);
  auto text = serialize_events(docs);
  auto back = parse_events(text);
  ASSERT_EQ(back.size(), docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    EXPECT_EQ(back[i].doc_id, docs[i].doc_id);
    EXPECT_EQ(back[i].events, docs[i].events);
  }
  EXPECT_EQ(serialize_events(back), text);
}

}  // namespace
}  // namespace elg
