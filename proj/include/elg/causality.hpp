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


// Rule-template causal mention extraction and BIO span encoding.
//
// A rule is <pattern, constraint, priority>. The pattern is a Perl-syntax
// regular expression over the sentence's surface tokens joined by single
// spaces, matched case-insensitively, with named groups "cause" and
// "effect". The constraint is a conjunction of atoms joined by '&':
//   pos(i)=TAG            token i (1-based, negative counts from the end)
//   contains_verb(cause)  the cause span holds a verbal token
//   contains_verb(effect)
//   len(cause)<=k         span length in tokens ('≤' is also accepted)
//   len(effect)<=k

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/regex.hpp>

#include "elg/corpus.hpp"
#include "elg/events.hpp"
#include "elg/metrics.hpp"

namespace elg {

// 0-based token positions, inclusive.
struct TokenSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool overlaps(const TokenSpan& o) const { return start <= o.end && o.start <= end; }
  bool operator==(const TokenSpan&) const = default;
  auto operator<=>(const TokenSpan&) const = default;
};

struct CausalMention {
  std::string doc_id;
  int sent_index = 0;
  TokenSpan cause;
  TokenSpan effect;
  std::string rule_id;
  std::optional<std::string> cause_event;
  std::optional<std::string> effect_event;
};

class RuleConstraint {
 public:
  static RuleConstraint parse(const std::string& text);  // "-" or "" = always
  bool holds(const ParsedSentence& sentence, const TokenSpan& cause,
             const TokenSpan& effect, const ExtractionOptions& options) const;

 private:
  enum class Kind { kPos, kContainsVerb, kMaxLength };
  struct Atom {
    Kind kind;
    bool on_cause = true;
    int index = 0;
    std::string tag;
    int limit = 0;
  };
  std::vector<Atom> atoms_;
};

struct CausalRule {
  std::string id;
  int priority = 0;
  std::string pattern;
  boost::regex regex;
  RuleConstraint constraint;
};

// File format: "id <TAB> priority <TAB> pattern <TAB> constraint" per line,
// '#' comments allowed. Rules come back sorted by descending priority.
// Bad regexes, missing groups and duplicate priorities throw ConfigError
// naming the rule. An empty rule set appends a note to `warnings`.
std::vector<CausalRule> parse_rules(const std::string& text,
                                    std::vector<std::string>* warnings = nullptr);
std::vector<CausalRule> load_rules(const std::filesystem::path& path,
                                   std::vector<std::string>* warnings = nullptr);

// Matches are resolved by priority, then leftmost, then longest; a match
// overlapping an already selected mention is discarded. Spans are trimmed
// of leading and trailing punctuation. When `resolve` is set each span is
// mapped to an event key (a verbal event inside the span, else a nominal
// event built from the span head and its modifiers).
std::vector<CausalMention> apply_rules(const ParsedSentence& sentence,
                                       std::span<const CausalRule> rules,
                                       const ExtractionOptions& options = {},
                                       bool resolve = true);

std::optional<std::string> resolve_span_event(const ParsedSentence& sentence,
                                              const TokenSpan& span,
                                              const ExtractionOptions& options = {});

enum class BioTag { kO, kBeginCause, kInsideCause, kBeginEffect, kInsideEffect };

std::string to_string(BioTag tag);
BioTag parse_bio_tag(const std::string& text);

// Throws DataError when spans overlap or fall outside the sentence.
std::vector<BioTag> to_bio(const ParsedSentence& sentence,
                           std::span<const CausalMention> mentions);
bool is_well_formed(std::span<const BioTag> tags);
// Pairs the i-th decoded cause span with the i-th decoded effect span.
std::vector<CausalMention> from_bio(const ParsedSentence& sentence,
                                    std::span<const BioTag> tags);

// Span-level exact match over (sentence, cause, effect). With `sentences`
// given, accuracy is token-level BIO accuracy over them; otherwise 0.
EvalMetrics evaluate_extraction(std::span<const CausalMention> predicted,
                                std::span<const CausalMention> gold,
                                std::span<const ParsedSentence> sentences = {});

// TSV: doc_id, sent_index, cause start/end, effect start/end, rule id,
// cause event, effect event ('-' when unresolved).
std::string serialize_mentions(std::span<const CausalMention> mentions);
std::vector<CausalMention> parse_mentions(const std::string& text);

struct GoldCorpus {
  ParsedCorpus corpus;
  std::vector<CausalMention> mentions;
};

// conllu-like token lines with a seventh BIO column.
GoldCorpus parse_gold(const std::string& text);
GoldCorpus load_gold(const std::filesystem::path& path);

}  // namespace elg
