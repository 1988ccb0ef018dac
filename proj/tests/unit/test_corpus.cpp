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

#include <fstream>
#include <sstream>

#include "elg/corpus.hpp"
#include "elg/error.hpp"
#include "elg/util.hpp"
#include "oracles.hpp"

namespace elg {
namespace {

using testing::data_dir;
using testing::make_sentence;

const char* kTwoSentences =
    "# doc_id = d1\n"
    "1\tTom\ttom\tPROPN\t2\tnsubj\n"
    "2\tpaid\tpay\tVERB\t0\troot\n"
    "3\tthe\tthe\tDET\t4\tdet\n"
    "4\tbill\tbill\tNOUN\t2\tobj\n"
    "\n"
    "1\tHe\the\tPRON\t2\tnsubj\n"
    "2\tleft\tleave\tVERB\t0\troot\n"
    "\n";

void expect_same(const ParsedCorpus& a, const ParsedCorpus& b) {
  ASSERT_EQ(a.documents.size(), b.documents.size());
  for (std::size_t d = 0; d < a.documents.size(); ++d) {
    EXPECT_EQ(a.documents[d].doc_id, b.documents[d].doc_id);
    ASSERT_EQ(a.documents[d].sentences.size(), b.documents[d].sentences.size());
    for (std::size_t s = 0; s < a.documents[d].sentences.size(); ++s) {
      EXPECT_EQ(a.documents[d].sentences[s].sent_index, b.documents[d].sentences[s].sent_index);
      EXPECT_EQ(a.documents[d].sentences[s].tokens, b.documents[d].sentences[s].tokens);
    }
  }
}

ParsedSentence sent(const std::string& word, int idx) {
  return make_sentence("d", idx, {{word, word, "NOUN", 2, "nsubj"}, {"ran", "run", "VERB", 0, "root"}});
}

TEST(Corpus, LoadsWellFormedSentences) {
  LoadReport rep;
  ParsedCorpus c = parse_conllu(kTwoSentences, &rep);
  ASSERT_EQ(c.documents.size(), 1u);
  EXPECT_EQ(c.documents[0].doc_id, "d1");
  EXPECT_EQ(c.sentence_count(), 2u);
  EXPECT_EQ(rep.sentences_dropped, 0u);
  EXPECT_EQ(c.documents[0].sentences[0].text(), "Tom paid the bill");
  EXPECT_EQ(c.documents[0].sentences[0].at(4).lemma, "bill");
}

TEST(Corpus, DropsSentenceWithHeadOutOfRange) {
  std::string text = kTwoSentences;
  text.replace(text.find("2\tleft\tleave\tVERB\t0"), 20, "2\tleft\tleave\tVERB\t9");
  LoadReport rep;
  ParsedCorpus c = parse_conllu(text, &rep);
  EXPECT_EQ(c.sentence_count(), 1u);
  EXPECT_EQ(rep.sentences_dropped, 1u);
}

TEST(Corpus, EmptyInputIsAnEmptyCorpusError) {
  EXPECT_THROW(parse_conllu(""), EmptyCorpusError);
  EXPECT_THROW(parse_jsonl(""), EmptyCorpusError);
}

TEST(Corpus, UnreadablePathIsAnIoError) {
  EXPECT_THROW(load_corpus("/nonexistent/corpus.conllu", CorpusFormat::kConllu), IoError);
}

TEST(Corpus, WellFormednessChecks) {
  ParsedSentence ok = sent("dog", 1);
  EXPECT_TRUE(is_well_formed(ok));
  ParsedSentence self = ok;
  self.tokens[0].head = 1;
  EXPECT_FALSE(is_well_formed(self));
  ParsedSentence two_roots = ok;
  two_roots.tokens[0].head = 0;
  EXPECT_FALSE(is_well_formed(two_roots));
  ParsedSentence gap = ok;
  gap.tokens[1].index = 3;
  EXPECT_FALSE(is_well_formed(gap));
  ParsedSentence no_rel = ok;
  no_rel.tokens[0].deprel.clear();
  EXPECT_FALSE(is_well_formed(no_rel));
}

TEST(Corpus, TenColumnConlluIsAccepted) {
  ParsedCorpus c = load_corpus(data_dir() / "restaurant.conllu", CorpusFormat::kConllu);
  EXPECT_EQ(c.documents.size(), 10u);
  EXPECT_EQ(c.documents.front().doc_id, "visit01");
}

TEST(Corpus, ConlluRoundTripIsAFixedPoint) {
  ParsedCorpus a = load_corpus(data_dir() / "restaurant.conllu", CorpusFormat::kConllu);
  std::ostringstream out;
  write_conllu(a, out);
  ParsedCorpus b = parse_conllu(out.str());
  expect_same(a, b);
  std::ostringstream again;
  write_conllu(b, again);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Corpus, JsonlRoundTripIsAFixedPoint) {
  ParsedCorpus a = parse_conllu(kTwoSentences);
  std::ostringstream out;
  write_jsonl(a, out);
  ParsedCorpus b = parse_jsonl(out.str());
  expect_same(a, b);
  std::ostringstream again;
  write_jsonl(b, again);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Corpus, JsonlDropsMalformedSentences) {
  const std::string line =
      R"({"doc_id":"x","sentences":[[{"index":1,"surface":"a","lemma":"a","pos":"X","head":0,"deprel":"root"},)"
      R"({"index":2,"surface":"b","lemma":"b","pos":"X","head":1,"deprel":"dep"}],)"
      R"([{"index":1,"surface":"c","lemma":"c","pos":"X","head":5,"deprel":"root"}]]})";
  LoadReport rep;
  ParsedCorpus c = parse_jsonl(line + "\n", &rep);
  EXPECT_EQ(c.sentence_count(), 1u);
  EXPECT_EQ(rep.sentences_dropped, 1u);
}

TEST(Clean, DropsConsecutiveDuplicates) {
  std::vector<ParsedSentence> in{sent("a", 1), sent("a", 2), sent("b", 3)};
  auto out = clean_document(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text(), "a ran");
  EXPECT_EQ(out[1].text(), "b ran");
}

TEST(Clean, DropsSentencesOutsideLengthBounds) {
  std::vector<ParsedSentence> in{make_sentence("d", 1, {{"Hi", "hi", "INTJ", 0, "root"}})};
  EXPECT_TRUE(clean_document(in).empty());
  CleanOptions tight;
  tight.max_tokens = 1;
  tight.min_tokens = 1;
  EXPECT_TRUE(clean_document(std::vector<ParsedSentence>{sent("a", 1)}, tight).empty());
}

TEST(Clean, KeepsNonConsecutiveDuplicates) {
  std::vector<ParsedSentence> in{sent("a", 1), sent("b", 2), sent("a", 3)};
  EXPECT_EQ(clean_document(in).size(), 3u);
}

TEST(Clean, IsIdempotentAndOrderPreserving) {
  std::vector<ParsedSentence> in;
  const char* words[] = {"a", "a", "b", "c", "c", "c", "a", "b", "b"};
  int i = 1;
  for (const char* w : words) in.push_back(sent(w, i++));
  in.push_back(make_sentence("d", i++, {{"x", "x", "X", 0, "root"}}));
  auto once = clean_document(in);
  auto twice = clean_document(once);
  ASSERT_EQ(once.size(), twice.size());
  for (std::size_t k = 0; k < once.size(); ++k) EXPECT_EQ(once[k].tokens, twice[k].tokens);
  std::vector<std::string> texts;
  for (const auto& s : once) texts.push_back(s.text());
  EXPECT_EQ(texts, (std::vector<std::string>{"a ran", "b ran", "c ran", "a ran", "b ran"}));
  for (std::size_t k = 1; k < once.size(); ++k) EXPECT_LT(once[k - 1].sent_index, once[k].sent_index);
}

TEST(Clean, CorpusDropsDuplicateDocumentsAndRenumbers) {
  ParsedCorpus c;
  c.documents.push_back({"d1", {sent("a", 1), sent("a", 2), sent("b", 3)}});
  c.documents.push_back({"d2", {sent("a", 1), sent("b", 2)}});
  c.documents.push_back({"d3", {sent("z", 1)}});
  ParsedCorpus out = clean_corpus(c);
  ASSERT_EQ(out.documents.size(), 2u);
  EXPECT_EQ(out.documents[0].doc_id, "d1");
  EXPECT_EQ(out.documents[1].doc_id, "d3");
  EXPECT_EQ(out.documents[0].sentences[1].sent_index, out.documents[0].sentences[0].sent_index + 1);
  ParsedCorpus again = clean_corpus(out);
  expect_same(out, again);
}

TEST(Util, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0}) {
    double back = 0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
}

TEST(Util, ParseIntRejectsTrailingGarbage) {
  long long v = 0;
  EXPECT_TRUE(parse_int("-42", v));
  EXPECT_EQ(v, -42);
  EXPECT_FALSE(parse_int("42x", v));
  EXPECT_FALSE(parse_int("", v));
}

}  // namespace
}  // namespace elg
