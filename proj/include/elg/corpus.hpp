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


// Pre-parsed corpus model: documents of dependency-parsed sentences.
//
// Two on-disk formats are supported. The conllu-like format has one token
// per line with tab-separated ID, FORM, LEMMA, UPOS, HEAD, DEPREL columns
// (an optional seventh column is ignored; ten-column CoNLL-U is also
// accepted), a blank line after each sentence and "# doc_id = X" lines
// opening documents. The jsonl format has one document per line:
//   {"doc_id": "d1", "sentences": [[{"index": 1, "surface": "Tom", ...}]]}

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace elg {

struct Token {
  int index = 0;  // 1-based
  std::string surface;
  std::string lemma;
  std::string pos;
  int head = 0;  // 0 = root
  std::string deprel;

  bool operator==(const Token&) const = default;
};

struct ParsedSentence {
  std::string doc_id;
  int sent_index = 0;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  // 1-based access, matching Token::index and Token::head.
  const Token& at(int index) const { return tokens.at(index - 1); }
  // Surface forms joined by single spaces.
  std::string text() const;
};

// Same tokens, ignoring doc_id and sent_index.
bool same_content(const ParsedSentence& a, const ParsedSentence& b);

struct Document {
  std::string doc_id;
  std::vector<ParsedSentence> sentences;
};

struct ParsedCorpus {
  std::vector<Document> documents;
  std::map<std::string, std::string> source_meta;

  std::size_t sentence_count() const;
  std::size_t token_count() const;
  // nullptr if absent.
  const ParsedSentence* find(const std::string& doc_id, int sent_index) const;
};

enum class CorpusFormat { kConllu, kJsonl };

CorpusFormat parse_corpus_format(const std::string& name);

struct LoadReport {
  std::size_t documents = 0;
  std::size_t sentences_kept = 0;
  std::size_t sentences_dropped = 0;
};

// Checks every ParsedSentence invariant: contiguous 1-based indices, heads in
// bounds and not self-referential, exactly one root, nonempty deprels.
bool is_well_formed(const ParsedSentence& sentence);

// Malformed sentences are dropped and counted in `report`. Throws IoError on
// an unreadable path and EmptyCorpusError when nothing valid remains.
ParsedCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                         LoadReport* report = nullptr);
ParsedCorpus parse_conllu(const std::string& text, LoadReport* report = nullptr);
ParsedCorpus parse_jsonl(const std::string& text, LoadReport* report = nullptr);

void write_conllu(const ParsedCorpus& corpus, std::ostream& out);
void write_jsonl(const ParsedCorpus& corpus, std::ostream& out);
void save_corpus(const ParsedCorpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format);

struct CleanOptions {
  std::size_t min_tokens = 2;
  std::size_t max_tokens = 200;
};

// Drops consecutive exact duplicates and sentences outside the length
// bounds. Order is preserved and sentence indices are left untouched.
std::vector<ParsedSentence> clean_document(std::span<const ParsedSentence> raw,
                                           const CleanOptions& options = {});

// Cleans every document, drops documents whose content duplicates an
// earlier one, drops documents left empty and renumbers sentence indices.
ParsedCorpus clean_corpus(const ParsedCorpus& corpus,
                          const CleanOptions& options = {});

}  // namespace elg
