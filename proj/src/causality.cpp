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


#include "elg/causality.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

namespace {

bool is_punct(const Token& t, const ExtractionOptions& options) {
  if (options.punct_tags.count(t.pos) > 0) return true;
  if (t.surface.empty()) return true;
  return std::all_of(t.surface.begin(), t.surface.end(),
                     [](unsigned char c) { return std::ispunct(c) != 0; });
}

std::string lemma_of(const Token& t) {
  if (t.lemma.empty() || t.lemma == "_") return to_lower(t.surface);
  return to_lower(t.lemma);
}

}  // namespace

RuleConstraint RuleConstraint::parse(const std::string& text) {
  RuleConstraint c;
  std::string spec(trim(text));
  if (spec.empty() || spec == "-") return c;
  // Normalize the unicode "≤" to "<=".
  for (std::size_t p; (p = spec.find("\xE2\x89\xA4")) != std::string::npos;)
    spec.replace(p, 3, "<=");
  for (const std::string& raw : split(spec, '&')) {
    std::string atom(trim(raw));
    if (atom.empty()) continue;
    auto bad = [&] { throw ConfigError("bad constraint atom '" + atom + "'"); };
    auto arg = [&](std::string_view prefix) -> std::string {
      const std::size_t close = atom.find(')');
      if (close == std::string::npos) bad();
      return std::string(trim(std::string_view(atom).substr(prefix.size(),
                                                            close - prefix.size())));
    };
    Atom a{};
    if (starts_with(atom, "pos(")) {
      long long idx = 0;
      const std::size_t eq = atom.find('=', atom.find(')'));
      if (!parse_int(arg("pos("), idx) || idx == 0 || eq == std::string::npos) bad();
      a.kind = Kind::kPos;
      a.index = static_cast<int>(idx);
      a.tag = std::string(trim(std::string_view(atom).substr(eq + 1)));
    } else if (starts_with(atom, "contains_verb(")) {
      const std::string which = arg("contains_verb(");
      if (which != "cause" && which != "effect") bad();
      a.kind = Kind::kContainsVerb;
      a.on_cause = which == "cause";
    } else if (starts_with(atom, "len(")) {
      const std::string which = arg("len(");
      const std::size_t le = atom.find("<=");
      long long k = 0;
      if ((which != "cause" && which != "effect") || le == std::string::npos ||
          !parse_int(trim(std::string_view(atom).substr(le + 2)), k))
        bad();
      a.kind = Kind::kMaxLength;
      a.on_cause = which == "cause";
      a.limit = static_cast<int>(k);
    } else {
      bad();
    }
    c.atoms_.push_back(std::move(a));
  }
  return c;
}

bool RuleConstraint::holds(const ParsedSentence& sentence, const TokenSpan& cause,
                           const TokenSpan& effect,
                           const ExtractionOptions& options) const {
  const int n = static_cast<int>(sentence.size());
  for (const Atom& a : atoms_) {
    const TokenSpan& span = a.on_cause ? cause : effect;
    switch (a.kind) {
      case Kind::kPos: {
        const int i = a.index > 0 ? a.index : n + 1 + a.index;
        if (i < 1 || i > n || sentence.at(i).pos != a.tag) return false;
        break;
      }
      case Kind::kContainsVerb: {
        bool found = false;
        for (int i = span.start; i <= span.end && !found; ++i)
          found = is_verb_tag(sentence.tokens[i].pos, options);
        if (!found) return false;
        break;
      }
      case Kind::kMaxLength:
        if (span.length() > a.limit) return false;
        break;
    }
  }
  return true;
}

std::vector<CausalRule> parse_rules(const std::string& text,
                                    std::vector<std::string>* warnings) {
  std::vector<CausalRule> rules;
  std::map<int, std::string> priorities;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> f = split(line, '\t');
    if (f.size() < 3 || f.size() > 4)
      throw ConfigError("rule line " + std::to_string(line_no) +
                        ": expected id, priority, pattern, constraint");
    CausalRule rule;
    rule.id = std::string(trim(f[0]));
    long long priority = 0;
    if (!parse_int(trim(f[1]), priority))
      throw ConfigError("rule " + rule.id + ": bad priority '" + f[1] + "'");
    rule.priority = static_cast<int>(priority);
    rule.pattern = f[2];
    try {
      rule.regex = boost::regex(rule.pattern, boost::regex::perl | boost::regex::icase);
    } catch (const boost::regex_error& e) {
      throw ConfigError("rule " + rule.id + ": bad regex: " + e.what());
    }
    if (rule.pattern.find("(?<cause>") == std::string::npos ||
        rule.pattern.find("(?<effect>") == std::string::npos)
      throw ConfigError("rule " + rule.id + ": pattern needs named groups cause and effect");
    try {
      rule.constraint = RuleConstraint::parse(f.size() == 4 ? f[3] : "-");
    } catch (const ConfigError& e) {
      throw ConfigError("rule " + rule.id + ": " + e.what());
    }
    auto [it, inserted] = priorities.emplace(rule.priority, rule.id);
    if (!inserted)
      throw ConfigError("rule " + rule.id + ": priority " + std::to_string(rule.priority) +
                        " already used by rule " + it->second);
    rules.push_back(std::move(rule));
  }
  if (rules.empty() && warnings != nullptr) warnings->push_back("rule set is empty");
  std::sort(rules.begin(), rules.end(),
            [](const CausalRule& a, const CausalRule& b) { return a.priority > b.priority; });
  return rules;
}

std::vector<CausalRule> load_rules(const std::filesystem::path& path,
                                   std::vector<std::string>* warnings) {
  return parse_rules(read_file(path), warnings);
}

std::optional<std::string> resolve_span_event(const ParsedSentence& sentence,
                                              const TokenSpan& span,
                                              const ExtractionOptions& options) {
  for (const EventOccurrence& occ : extract_events(sentence, options)) {
    const int p = occ.predicate_index - 1;
    if (p >= span.start && p <= span.end) return occ.event;
  }
  // Nominal event: span head plus its compound/adjectival modifiers.
  static const std::set<std::string> kModifiers{"compound", "amod", "nn", "ATT", "flat"};
  int head = -1;
  for (int i = span.start; i <= span.end; ++i) {
    const Token& t = sentence.tokens[i];
    if (is_punct(t, options)) continue;
    const int h = t.head - 1;
    if (h < span.start || h > span.end) {
      head = i;
      break;
    }
  }
  if (head < 0) return std::nullopt;
  EventTuple ev;
  for (int i = span.start; i <= span.end; ++i) {
    const Token& t = sentence.tokens[i];
    if (t.head - 1 == head && kModifiers.count(t.deprel) > 0) ev.subject.push_back(lemma_of(t));
  }
  ev.predicate.push_back(lemma_of(sentence.tokens[head]));
  return ev.key();
}

std::vector<CausalMention> apply_rules(const ParsedSentence& sentence,
                                       std::span<const CausalRule> rules,
                                       const ExtractionOptions& options, bool resolve) {
  const int n = static_cast<int>(sentence.size());
  std::string text;
  std::vector<std::pair<int, int>> offsets;  // char [begin, end) per token
  for (const Token& t : sentence.tokens) {
    if (!text.empty()) text.push_back(' ');
    offsets.emplace_back(static_cast<int>(text.size()),
                         static_cast<int>(text.size() + t.surface.size()));
    text += t.surface;
  }
  auto to_span = [&](int cb, int ce) -> std::optional<TokenSpan> {
    int first = -1, last = -1;
    for (int i = 0; i < n; ++i) {
      if (offsets[i].second <= cb || offsets[i].first >= ce) continue;
      if (first < 0) first = i;
      last = i;
    }
    while (first >= 0 && first <= last && is_punct(sentence.tokens[first], options)) ++first;
    while (last >= first && first >= 0 && is_punct(sentence.tokens[last], options)) --last;
    if (first < 0 || last < first) return std::nullopt;
    return TokenSpan{first, last};
  };

  struct Candidate {
    int priority;
    TokenSpan region;
    CausalMention mention;
  };
  std::vector<Candidate> candidates;
  for (const CausalRule& rule : rules) {
    for (boost::sregex_iterator it(text.begin(), text.end(), rule.regex), end; it != end;
         ++it) {
      const boost::smatch& m = *it;
      if (!m["cause"].matched || !m["effect"].matched) continue;
      auto cause = to_span(static_cast<int>(m.position("cause")),
                           static_cast<int>(m.position("cause") + m.length("cause")));
      auto effect = to_span(static_cast<int>(m.position("effect")),
                            static_cast<int>(m.position("effect") + m.length("effect")));
      if (!cause || !effect || cause->overlaps(*effect)) continue;
      if (!rule.constraint.holds(sentence, *cause, *effect, options)) continue;
      CausalMention mention{sentence.doc_id, sentence.sent_index, *cause, *effect, rule.id,
                            std::nullopt, std::nullopt};
      TokenSpan region{std::min(cause->start, effect->start), std::max(cause->end, effect->end)};
      candidates.push_back(Candidate{rule.priority, region, std::move(mention)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return std::make_tuple(-a.priority, a.region.start, -a.region.length()) <
                            std::make_tuple(-b.priority, b.region.start, -b.region.length());
                   });
  std::vector<CausalMention> out;
  std::vector<TokenSpan> taken;
  for (Candidate& c : candidates) {
    bool clash = std::any_of(taken.begin(), taken.end(),
                             [&](const TokenSpan& t) { return t.overlaps(c.region); });
    if (clash) continue;
    taken.push_back(c.region);
    if (resolve) {
      c.mention.cause_event = resolve_span_event(sentence, c.mention.cause, options);
      c.mention.effect_event = resolve_span_event(sentence, c.mention.effect, options);
    }
    out.push_back(std::move(c.mention));
  }
  std::sort(out.begin(), out.end(), [](const CausalMention& a, const CausalMention& b) {
    return std::min(a.cause.start, a.effect.start) < std::min(b.cause.start, b.effect.start);
  });
  return out;
}

std::string to_string(BioTag tag) {
  switch (tag) {
    case BioTag::kO:
      return "O";
    case BioTag::kBeginCause:
      return "B-cause";
    case BioTag::kInsideCause:
      return "I-cause";
    case BioTag::kBeginEffect:
      return "B-effect";
    case BioTag::kInsideEffect:
      return "I-effect";
  }
  return "O";
}

BioTag parse_bio_tag(const std::string& text) {
  if (text == "O") return BioTag::kO;
  if (text == "B-cause") return BioTag::kBeginCause;
  if (text == "I-cause") return BioTag::kInsideCause;
  if (text == "B-effect") return BioTag::kBeginEffect;
  if (text == "I-effect") return BioTag::kInsideEffect;
  throw DataError("bad BIO tag '" + text + "'");
}

std::vector<BioTag> to_bio(const ParsedSentence& sentence,
                           std::span<const CausalMention> mentions) {
  const int n = static_cast<int>(sentence.size());
  std::vector<BioTag> tags(static_cast<std::size_t>(n), BioTag::kO);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  auto paint = [&](const TokenSpan& s, BioTag begin, BioTag inside) {
    if (s.start < 0 || s.end >= n || s.start > s.end)
      throw DataError("mention span out of sentence bounds");
    for (int i = s.start; i <= s.end; ++i) {
      if (used[i]) throw DataError("overlapping mentions");
      used[i] = true;
      tags[i] = i == s.start ? begin : inside;
    }
  };
  for (const CausalMention& m : mentions) {
    paint(m.cause, BioTag::kBeginCause, BioTag::kInsideCause);
    paint(m.effect, BioTag::kBeginEffect, BioTag::kInsideEffect);
  }
  return tags;
}

bool is_well_formed(std::span<const BioTag> tags) {
  BioTag prev = BioTag::kO;
  for (BioTag t : tags) {
    if (t == BioTag::kInsideCause && prev != BioTag::kBeginCause && prev != BioTag::kInsideCause)
      return false;
    if (t == BioTag::kInsideEffect && prev != BioTag::kBeginEffect &&
        prev != BioTag::kInsideEffect)
      return false;
    prev = t;
  }
  return true;
}

std::vector<CausalMention> from_bio(const ParsedSentence& sentence,
                                    std::span<const BioTag> tags) {
  if (!is_well_formed(tags)) throw DataError("ill-formed BIO sequence");
  std::vector<TokenSpan> causes, effects;
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    if (tags[i] == BioTag::kBeginCause) causes.push_back({i, i});
    if (tags[i] == BioTag::kInsideCause) causes.back().end = i;
    if (tags[i] == BioTag::kBeginEffect) effects.push_back({i, i});
    if (tags[i] == BioTag::kInsideEffect) effects.back().end = i;
  }
  if (causes.size() != effects.size())
    throw DataError("BIO sequence has unpaired cause/effect spans");
  std::vector<CausalMention> out;
  for (std::size_t k = 0; k < causes.size(); ++k)
    out.push_back(CausalMention{sentence.doc_id, sentence.sent_index, causes[k], effects[k],
                                "gold", std::nullopt, std::nullopt});
  return out;
}

EvalMetrics evaluate_extraction(std::span<const CausalMention> predicted,
                                std::span<const CausalMention> gold,
                                std::span<const ParsedSentence> sentences) {
  using Key = std::tuple<std::string, int, TokenSpan, TokenSpan>;
  std::map<Key, int> gold_bag;
  for (const CausalMention& m : gold) ++gold_bag[Key{m.doc_id, m.sent_index, m.cause, m.effect}];
  std::size_t matched = 0;
  for (const CausalMention& m : predicted) {
    auto it = gold_bag.find(Key{m.doc_id, m.sent_index, m.cause, m.effect});
    if (it != gold_bag.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  EvalMetrics out;
  out.precision = predicted.empty() ? 0.0 : 100.0 * matched / predicted.size();
  out.recall = gold.empty() ? 0.0 : 100.0 * matched / gold.size();
  out.f1 = f1_score(out.precision, out.recall);
  if (!sentences.empty()) {
    std::size_t correct = 0, total = 0;
    for (const ParsedSentence& s : sentences) {
      std::vector<CausalMention> p, g;
      for (const CausalMention& m : predicted)
        if (m.doc_id == s.doc_id && m.sent_index == s.sent_index) p.push_back(m);
      for (const CausalMention& m : gold)
        if (m.doc_id == s.doc_id && m.sent_index == s.sent_index) g.push_back(m);
      const std::vector<BioTag> tp = to_bio(s, p);
      const std::vector<BioTag> tg = to_bio(s, g);
      for (std::size_t i = 0; i < tp.size(); ++i) correct += tp[i] == tg[i] ? 1 : 0;
      total += tp.size();
    }
    out.accuracy = total == 0 ? 0.0 : 100.0 * correct / total;
  }
  return out;
}

GoldCorpus parse_gold(const std::string& text) {
  std::vector<std::vector<BioTag>> tags;
  {
    std::istringstream in(text);
    std::string line;
    std::vector<BioTag> current;
    bool open = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string_view l = trim(line);
      if (l.empty()) {
        if (open) tags.push_back(std::move(current));
        current.clear();
        open = false;
        continue;
      }
      if (l.front() == '#') continue;
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 7) throw DataError("gold file: expected 7 columns: " + line);
      current.push_back(parse_bio_tag(std::string(trim(cols[6]))));
      open = true;
    }
    if (open) tags.push_back(std::move(current));
  }
  LoadReport report;
  GoldCorpus gold;
  gold.corpus = parse_conllu(text, &report);
  if (report.sentences_dropped > 0) throw DataError("gold file has malformed sentences");
  std::size_t k = 0;
  for (const Document& d : gold.corpus.documents) {
    for (const ParsedSentence& s : d.sentences) {
      const std::vector<BioTag>& t = tags.at(k++);
      if (t.size() != s.size()) throw DataError("gold file: tag count mismatch");
      for (CausalMention& m : from_bio(s, t)) gold.mentions.push_back(std::move(m));
    }
  }
  return gold;
}

GoldCorpus load_gold(const std::filesystem::path& path) { return parse_gold(read_file(path)); }

std::string serialize_mentions(std::span<const CausalMention> mentions) {
  std::string out;
  for (const auto& m : mentions) {
    out += m.doc_id + "\t" + std::to_string(m.sent_index) + "\t" +
           std::to_string(m.cause.start) + "\t" + std::to_string(m.cause.end) + "\t" +
           std::to_string(m.effect.start) + "\t" + std::to_string(m.effect.end) + "\t" +
           m.rule_id + "\t" + m.cause_event.value_or("-") + "\t" +
           m.effect_event.value_or("-") + "\n";
  }
  return out;
}

std::vector<CausalMention> parse_mentions(const std::string& text) {
  std::vector<CausalMention> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto f = split(line, '\t');
    long long v[5];
    bool ok = f.size() == 9;
    for (int k = 0; ok && k < 5; ++k) ok = parse_int(f[1 + k], v[k]);
    if (!ok) throw DataError("mentions line " + std::to_string(lineno) + ": malformed");
    CausalMention m;
    m.doc_id = f[0];
    m.sent_index = static_cast<int>(v[0]);
    m.cause = {static_cast<int>(v[1]), static_cast<int>(v[2])};
    m.effect = {static_cast<int>(v[3]), static_cast<int>(v[4])};
    m.rule_id = f[6];
    if (f[7] != "-") m.cause_event = f[7];
    if (f[8] != "-") m.effect_event = f[8];
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace elg
