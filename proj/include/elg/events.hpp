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


// (S, P, O) event tuples extracted from dependency parses.

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/regex.hpp>

#include "elg/corpus.hpp"

namespace elg {

// Generalized event. Slots hold lowercased lemmas; an empty slot is absent.
// The predicate (trigger) is never empty for a valid event.
struct EventTuple {
  std::vector<std::string> subject;
  std::vector<std::string> predicate;
  std::vector<std::string> object;

  // "S|P|O" with lemmas joined by '_' inside each slot.
  std::string key() const;
  static EventTuple from_key(std::string_view key);

  std::string subject_key() const;
  std::string predicate_key() const;
  std::string object_key() const;

  bool operator==(const EventTuple&) const = default;
};

struct EventOccurrence {
  std::string event;  // EventTuple key
  std::string doc_id;
  int sent_index = 0;
  int span_start = 0;  // 1-based token indices, inclusive
  int span_end = 0;
  int predicate_index = 0;
  std::vector<std::string> extra;  // X slot: adverbials and complements

  bool operator==(const EventOccurrence&) const = default;
};

// Events of one document in text order.
struct DocumentEvents {
  std::string doc_id;
  std::vector<EventOccurrence> events;
};

struct ExtractionOptions {
  std::set<std::string> subject_rels{"nsubj", "subj", "SBV", "nsubj:pass"};
  std::set<std::string> object_rels{"obj", "dobj", "VOB"};
  std::set<std::string> conj_rels{"conj", "COO"};
  // Dependents folded into the predicate slot ("give up").
  std::set<std::string> particle_rels{"compound:prt", "prt"};
  // Dependents folded into an argument slot ("ocean pollution").
  std::set<std::string> compound_rels{"compound", "flat", "nn"};
  // Tags treated as verbal triggers; entries ending in '*' are prefixes.
  std::set<std::string> verb_tags{"VERB", "v", "VB*", "VV*"};
  std::set<std::string> punct_tags{"PUNCT", "wp", "."};
};

bool is_verb_tag(const std::string& pos, const ExtractionOptions& options);

// One occurrence per verbal predicate head, ordered by predicate position.
// Conjoined verbs without a subject inherit the subject of their head verb.
// Events lacking both subject and object are dropped unless the trigger
// spans at least two lemmas.
std::vector<EventOccurrence> extract_events(const ParsedSentence& sentence,
                                            const ExtractionOptions& options = {});

std::vector<DocumentEvents> extract_corpus_events(
    const ParsedCorpus& corpus, const ExtractionOptions& options = {});

// Keeps occurrences whose key occurs at least `threshold` times in the input.
std::vector<EventOccurrence> filter_low_frequency(
    std::span<const EventOccurrence> occurrences, std::size_t threshold);

// Generality blacklist. File lines are "key:<exact key>", "pred:<lemma>"
// or "re:<regex over key>"; '#' starts a comment line.
class GeneralityBlacklist {
 public:
  GeneralityBlacklist() = default;

  // Regexes are compiled here, so a malformed one throws ConfigError.
  static GeneralityBlacklist parse(const std::string& text);
  static GeneralityBlacklist load(const std::filesystem::path& path);

  bool matches(const std::string& event_key) const;
  bool empty() const {
    return keys_.empty() && predicates_.empty() && patterns_.empty();
  }

 private:
  std::set<std::string> keys_;
  std::set<std::string> predicates_;
  std::vector<boost::regex> patterns_;
};

std::vector<EventOccurrence> filter_general(
    std::span<const EventOccurrence> occurrences,
    const GeneralityBlacklist& blacklist);

// Applies a per-occurrence filter across documents, keeping document order.
std::vector<DocumentEvents> filter_corpus_events(
    const std::vector<DocumentEvents>& docs, std::size_t min_frequency,
    const GeneralityBlacklist& blacklist);

// TSV persistence: doc_id, sent_index, span_start, span_end, predicate_index,
// key, extra lemmas joined by ' '.
std::string serialize_events(const std::vector<DocumentEvents>& docs);
std::vector<DocumentEvents> parse_events(const std::string& text);

}  // namespace elg
