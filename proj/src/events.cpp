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


#include "elg/events.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

namespace {

std::string slot_key(const std::vector<std::string>& slot) {
  return join(slot, "_");
}

std::vector<std::string> slot_from_key(std::string_view part) {
  if (part.empty()) return {};
  return split(part, '_');
}

}  // namespace

std::string EventTuple::key() const {
  return slot_key(subject) + "|" + slot_key(predicate) + "|" + slot_key(object);
}

EventTuple EventTuple::from_key(std::string_view key) {
  std::vector<std::string> parts = split(key, '|');
  if (parts.size() != 3 || parts[1].empty())
    throw DataError("malformed event key: " + std::string(key));
  return EventTuple{slot_from_key(parts[0]), slot_from_key(parts[1]),
                    slot_from_key(parts[2])};
}

std::string EventTuple::subject_key() const { return slot_key(subject); }
std::string EventTuple::predicate_key() const { return slot_key(predicate); }
std::string EventTuple::object_key() const { return slot_key(object); }

bool is_verb_tag(const std::string& pos, const ExtractionOptions& options) {
  for (const std::string& tag : options.verb_tags) {
    if (!tag.empty() && tag.back() == '*') {
      if (starts_with(pos, std::string_view(tag).substr(0, tag.size() - 1)))
        return true;
    } else if (pos == tag) {
      return true;
    }
  }
  return false;
}

namespace {

std::string lemma_of(const Token& t) {
  if (t.lemma.empty() || t.lemma == "_") return to_lower(t.surface);
  return to_lower(t.lemma);
}

struct Slot {
  std::vector<std::string> lemmas;
  std::vector<int> token_indices;
};

// Per-predicate analysis before conjunction propagation.
struct Clause {
  int verb = 0;
  Slot subject;
  Slot predicate;
  Slot object;
  std::vector<std::string> extra;
  int conj_head = 0;  // governing verb when attached by a conj relation
};

}  // namespace

std::vector<EventOccurrence> extract_events(const ParsedSentence& sentence,
                                            const ExtractionOptions& options) {
  const int n = static_cast<int>(sentence.tokens.size());
  std::vector<std::vector<int>> children(n + 1);
  for (const Token& t : sentence.tokens)
    if (t.head >= 0 && t.head <= n) children[t.head].push_back(t.index);

  auto argument = [&](int head_index) {
    Slot slot;
    std::vector<int> members{head_index};
    for (int c : children[head_index])
      if (options.compound_rels.count(sentence.at(c).deprel) > 0) members.push_back(c);
    std::sort(members.begin(), members.end());
    for (int m : members) slot.lemmas.push_back(lemma_of(sentence.at(m)));
    slot.token_indices = members;
    return slot;
  };

  static const std::set<std::string> kNonExtra{"punct", "conj", "cc", "aux",
                                               "aux:pass", "mark", "det", "cop",
                                               "WP", "COO", "LAD", "RAD"};

  std::map<int, Clause> clauses;
  for (const Token& t : sentence.tokens) {
    if (!is_verb_tag(t.pos, options)) continue;
    Clause clause;
    clause.verb = t.index;
    std::vector<int> pred_members{t.index};
    for (int c : children[t.index]) {
      const Token& dep = sentence.at(c);
      if (options.subject_rels.count(dep.deprel) > 0 && clause.subject.lemmas.empty()) {
        clause.subject = argument(c);
      } else if (options.object_rels.count(dep.deprel) > 0 &&
                 clause.object.lemmas.empty()) {
        clause.object = argument(c);
      } else if (options.particle_rels.count(dep.deprel) > 0) {
        pred_members.push_back(c);
      } else if (kNonExtra.count(dep.deprel) == 0 &&
                 options.punct_tags.count(dep.pos) == 0 &&
                 options.conj_rels.count(dep.deprel) == 0) {
        clause.extra.push_back(lemma_of(dep));
      }
    }
    std::sort(pred_members.begin(), pred_members.end());
    for (int m : pred_members) clause.predicate.lemmas.push_back(lemma_of(sentence.at(m)));
    clause.predicate.token_indices = pred_members;
    if (options.conj_rels.count(t.deprel) > 0 && t.head > 0 &&
        is_verb_tag(sentence.at(t.head).pos, options)) {
      clause.conj_head = t.head;
    }
    clauses.emplace(t.index, std::move(clause));
  }

  // Conjoined verbs inherit the nearest explicit subject up the conj chain.
  std::function<const Slot*(int, int)> inherited = [&](int verb, int depth) -> const Slot* {
    auto it = clauses.find(verb);
    if (it == clauses.end() || depth > n) return nullptr;
    if (!it->second.subject.lemmas.empty()) return &it->second.subject;
    if (it->second.conj_head == 0) return nullptr;
    return inherited(it->second.conj_head, depth + 1);
  };

  std::vector<EventOccurrence> out;
  for (const auto& [verb, clause] : clauses) {
    EventTuple tuple;
    tuple.predicate = clause.predicate.lemmas;
    tuple.object = clause.object.lemmas;
    tuple.subject = clause.subject.lemmas;
    if (tuple.subject.empty() && clause.conj_head != 0) {
      if (const Slot* s = inherited(clause.conj_head, 0)) tuple.subject = s->lemmas;
    }
    if (tuple.subject.empty() && tuple.object.empty() && tuple.predicate.size() < 2)
      continue;
    std::vector<int> own = clause.predicate.token_indices;
    own.insert(own.end(), clause.subject.token_indices.begin(),
               clause.subject.token_indices.end());
    own.insert(own.end(), clause.object.token_indices.begin(),
               clause.object.token_indices.end());
    EventOccurrence occ;
    occ.event = tuple.key();
    occ.doc_id = sentence.doc_id;
    occ.sent_index = sentence.sent_index;
    occ.span_start = *std::min_element(own.begin(), own.end());
    occ.span_end = *std::max_element(own.begin(), own.end());
    occ.predicate_index = verb;
    occ.extra = clause.extra;
    out.push_back(std::move(occ));
  }
  return out;
}

std::vector<DocumentEvents> extract_corpus_events(const ParsedCorpus& corpus,
                                                  const ExtractionOptions& options) {
  std::vector<DocumentEvents> out;
  out.reserve(corpus.documents.size());
  for (const Document& doc : corpus.documents) {
    DocumentEvents de{doc.doc_id, {}};
    for (const ParsedSentence& s : doc.sentences) {
      std::vector<EventOccurrence> occ = extract_events(s, options);
      de.events.insert(de.events.end(), std::make_move_iterator(occ.begin()),
                       std::make_move_iterator(occ.end()));
    }
    out.push_back(std::move(de));
  }
  return out;
}

std::vector<EventOccurrence> filter_low_frequency(
    std::span<const EventOccurrence> occurrences, std::size_t threshold) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const EventOccurrence& o : occurrences) ++freq[o.event];
  std::vector<EventOccurrence> out;
  for (const EventOccurrence& o : occurrences)
    if (freq[o.event] >= threshold) out.push_back(o);
  return out;
}

GeneralityBlacklist GeneralityBlacklist::parse(const std::string& text) {
  GeneralityBlacklist list;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (starts_with(line, "key:")) {
      list.keys_.insert(std::string(trim(line.substr(4))));
    } else if (starts_with(line, "pred:")) {
      list.predicates_.insert(to_lower(trim(line.substr(5))));
    } else if (starts_with(line, "re:")) {
      try {
        list.patterns_.emplace_back(std::string(trim(line.substr(3))));
      } catch (const boost::regex_error& e) {
        throw ConfigError("blacklist line " + std::to_string(line_no) +
                          ": bad regex: " + e.what());
      }
    } else {
      throw ConfigError("blacklist line " + std::to_string(line_no) +
                        ": expected key:, pred: or re: prefix");
    }
  }
  return list;
}

GeneralityBlacklist GeneralityBlacklist::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

bool GeneralityBlacklist::matches(const std::string& event_key) const {
  if (keys_.count(event_key) > 0) return true;
  if (!predicates_.empty()) {
    std::vector<std::string> parts = split(event_key, '|');
    if (parts.size() == 3 && predicates_.count(parts[1]) > 0) return true;
  }
  for (const boost::regex& re : patterns_)
    if (boost::regex_search(event_key, re)) return true;
  return false;
}

std::vector<EventOccurrence> filter_general(std::span<const EventOccurrence> occurrences,
                                            const GeneralityBlacklist& blacklist) {
  std::vector<EventOccurrence> out;
  for (const EventOccurrence& o : occurrences)
    if (!blacklist.matches(o.event)) out.push_back(o);
  return out;
}

std::vector<DocumentEvents> filter_corpus_events(const std::vector<DocumentEvents>& docs,
                                                 std::size_t min_frequency,
                                                 const GeneralityBlacklist& blacklist) {
  std::vector<EventOccurrence> all;
  for (const DocumentEvents& d : docs) all.insert(all.end(), d.events.begin(), d.events.end());
  std::unordered_map<std::string, std::size_t> freq;
  for (const EventOccurrence& o : all) ++freq[o.event];
  std::vector<DocumentEvents> out;
  for (const DocumentEvents& d : docs) {
    DocumentEvents kept{d.doc_id, {}};
    for (const EventOccurrence& o : d.events)
      if (freq[o.event] >= min_frequency && !blacklist.matches(o.event))
        kept.events.push_back(o);
    out.push_back(std::move(kept));
  }
  return out;
}

std::string serialize_events(const std::vector<DocumentEvents>& docs) {
  std::ostringstream out;
  for (const DocumentEvents& d : docs) {
    out << "#doc\t" << d.doc_id << '\n';
    for (const EventOccurrence& o : d.events) {
      out << o.doc_id << '\t' << o.sent_index << '\t' << o.span_start << '\t'
          << o.span_end << '\t' << o.predicate_index << '\t' << o.event << '\t'
          << join(o.extra, " ") << '\n';
    }
  }
  return out.str();
}

std::vector<DocumentEvents> parse_events(const std::string& text) {
  std::vector<DocumentEvents> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols[0] == "#doc" && cols.size() == 2) {
      out.push_back(DocumentEvents{cols[1], {}});
      continue;
    }
    long long sent = 0, start = 0, end = 0, pred = 0;
    if (out.empty() || cols.size() != 7 || !parse_int(cols[1], sent) ||
        !parse_int(cols[2], start) || !parse_int(cols[3], end) ||
        !parse_int(cols[4], pred))
      throw DataError("events line " + std::to_string(line_no) + " malformed");
    EventOccurrence o;
    o.doc_id = cols[0];
    o.sent_index = static_cast<int>(sent);
    o.span_start = static_cast<int>(start);
    o.span_end = static_cast<int>(end);
    o.predicate_index = static_cast<int>(pred);
    o.event = cols[5];
    if (!cols[6].empty()) o.extra = split(cols[6], ' ');
    out.back().events.push_back(std::move(o));
  }
  return out;
}

}  // namespace elg
