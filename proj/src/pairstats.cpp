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


#include "elg/pairstats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

PairKey make_pair_key(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

namespace {

template <typename Map, typename K>
long long lookup(const Map& m, const K& key) {
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

}  // namespace

void PairCounts::add_occurrence(const std::string& event_key) {
  EventTuple t = EventTuple::from_key(event_key);
  ++events_[event_key];
  ++verbs_[t.predicate_key()];
  if (!t.object.empty()) ++objects_[t.object_key()];
  ++n_events_;
}

void PairCounts::add_argument_pairs(const std::string& a, const std::string& b,
                                    long long n) {
  const EventTuple p = EventTuple::from_key(a);
  const EventTuple q = EventTuple::from_key(b);
  const std::string vp = p.predicate_key(), vq = q.predicate_key();
  const std::string op = p.object_key(), oq = q.object_key();
  verb_verb_[make_pair_key(vp, vq)] += n;
  if (!op.empty() && !oq.empty()) object_object_[make_pair_key(op, oq)] += n;
  std::set<PairKey> vo;
  if (!oq.empty()) vo.emplace(vp, oq);
  if (!op.empty()) vo.emplace(vq, op);
  for (const PairKey& k : vo) verb_object_[k] += n;
}

void PairCounts::add_match(const std::string& earlier, const std::string& later) {
  if (earlier == later) return;
  auto& entry = pairs_[make_pair_key(earlier, later)];
  if (earlier < later) {
    ++entry.first;
  } else {
    ++entry.second;
  }
  ++n_pairs_;
  add_argument_pairs(earlier, later, 1);
}

void PairCounts::merge(const PairCounts& other) {
  for (const auto& [k, v] : other.events_) events_[k] += v;
  for (const auto& [k, v] : other.verbs_) verbs_[k] += v;
  for (const auto& [k, v] : other.objects_) objects_[k] += v;
  for (const auto& [k, v] : other.pairs_) {
    pairs_[k].first += v.first;
    pairs_[k].second += v.second;
  }
  for (const auto& [k, v] : other.verb_verb_) verb_verb_[k] += v;
  for (const auto& [k, v] : other.verb_object_) verb_object_[k] += v;
  for (const auto& [k, v] : other.object_object_) object_object_[k] += v;
  n_events_ += other.n_events_;
  n_pairs_ += other.n_pairs_;
  n_tokens_ += other.n_tokens_;
}

long long PairCounts::event_count(const std::string& key) const {
  return lookup(events_, key);
}
long long PairCounts::verb_count(const std::string& verb) const {
  return lookup(verbs_, verb);
}
long long PairCounts::object_count(const std::string& object) const {
  return object.empty() ? 0 : lookup(objects_, object);
}

long long PairCounts::before(const std::string& a, const std::string& b) const {
  if (a == b) return 0;
  auto it = pairs_.find(make_pair_key(a, b));
  if (it == pairs_.end()) return 0;
  return a < b ? it->second.first : it->second.second;
}

long long PairCounts::together(const std::string& a, const std::string& b) const {
  return before(a, b) + before(b, a);
}

long long PairCounts::verb_verb(const std::string& u, const std::string& v) const {
  return lookup(verb_verb_, make_pair_key(u, v));
}
long long PairCounts::verb_object(const std::string& verb,
                                  const std::string& object) const {
  if (object.empty()) return 0;
  return lookup(verb_object_, PairKey{verb, object});
}
long long PairCounts::object_object(const std::string& u, const std::string& v) const {
  if (u.empty() || v.empty()) return 0;
  return lookup(object_object_, make_pair_key(u, v));
}

bool PairCounts::operator==(const PairCounts& o) const {
  return events_ == o.events_ && pairs_ == o.pairs_ && n_tokens_ == o.n_tokens_ &&
         verb_verb_ == o.verb_verb_ && verb_object_ == o.verb_object_ &&
         object_object_ == o.object_object_;
}

std::string PairCounts::serialize() const {
  std::ostringstream out;
  out << "[TOTALS]\n";
  out << "n_events\t" << n_events_ << "\n";
  out << "n_pairs\t" << n_pairs_ << "\n";
  out << "n_tokens\t" << n_tokens_ << "\n";
  out << "[EVENTS]\n";
  for (const auto& [key, n] : events_) {
    EventTuple t = EventTuple::from_key(key);
    out << key << '\t' << n << '\t' << verb_count(t.predicate_key()) << '\t'
        << object_count(t.object_key()) << '\n';
  }
  out << "[PAIRS]\n";
  for (const auto& [k, v] : pairs_) {
    out << k.first << '\t' << k.second << '\t' << v.first + v.second << '\t' << v.first
        << '\t' << v.second << '\n';
  }
  return out.str();
}

PairCounts PairCounts::parse(const std::string& text) {
  PairCounts c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  long long declared_events = -1, declared_pairs = -1;
  auto fail = [&](const std::string& what) {
    throw DataError("counts line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line;
      continue;
    }
    std::vector<std::string> f = split(line, '\t');
    if (section == "[TOTALS]") {
      long long v = 0;
      if (f.size() != 2 || !parse_int(f[1], v)) fail("bad total");
      if (f[0] == "n_tokens") c.n_tokens_ = v;
      if (f[0] == "n_events") declared_events = v;
      if (f[0] == "n_pairs") declared_pairs = v;
    } else if (section == "[EVENTS]") {
      long long n = 0;
      if (f.size() != 4 || !parse_int(f[1], n) || n < 0) fail("bad event row");
      for (long long i = 0; i < n; ++i) c.add_occurrence(f[0]);
    } else if (section == "[PAIRS]") {
      long long t1 = 0, t2 = 0, t3 = 0;
      if (f.size() != 5 || !parse_int(f[2], t1) || !parse_int(f[3], t2) ||
          !parse_int(f[4], t3) || t2 < 0 || t3 < 0 || t1 != t2 + t3 || f[0] >= f[1])
        fail("bad pair row");
      c.pairs_[PairKey{f[0], f[1]}] = {t2, t3};
      c.n_pairs_ += t1;
      // Argument co-occurrence is a function of the unordered pair only.
      c.add_argument_pairs(f[0], f[1], t1);
    } else {
      fail("row outside a section");
    }
  }
  if ((declared_events >= 0 && declared_events != c.n_events_) ||
      (declared_pairs >= 0 && declared_pairs != c.n_pairs_))
    throw DataError("counts: totals disagree with rows");
  return c;
}

PairCounts count_pairs(std::span<const DocumentEvents> docs, const CountOptions& options,
                       const ParsedCorpus* corpus, ContextIndex* contexts) {
  std::unordered_map<std::string, const Document*> by_id;
  if (corpus != nullptr)
    for (const Document& d : corpus->documents) by_id.emplace(d.doc_id, &d);

  PairCounts counts;
  for (const DocumentEvents& de : docs) {
    const Document* doc = nullptr;
    if (auto it = by_id.find(de.doc_id); it != by_id.end()) doc = it->second;
    if (doc != nullptr)
      for (const ParsedSentence& s : doc->sentences)
        counts.add_tokens(static_cast<long long>(s.tokens.size()));

    std::vector<EventOccurrence> occ = de.events;
    std::stable_sort(occ.begin(), occ.end(), [](const auto& x, const auto& y) {
      return std::tie(x.sent_index, x.predicate_index) <
             std::tie(y.sent_index, y.predicate_index);
    });
    std::vector<std::set<std::string>> partners(occ.size());
    for (std::size_t j = 0; j < occ.size(); ++j) {
      counts.add_occurrence(occ[j].event);
      for (std::size_t i = j; i-- > 0;) {
        if (occ[j].sent_index - occ[i].sent_index > options.window_sentences) break;
        if (occ[i].event == occ[j].event) continue;
        if (partners[j].count(occ[i].event) > 0 || partners[i].count(occ[j].event) > 0)
          continue;
        partners[j].insert(occ[i].event);
        partners[i].insert(occ[j].event);
        counts.add_match(occ[i].event, occ[j].event);
        if (contexts == nullptr || doc == nullptr) continue;

        CoOccurrenceContext ctx{occ[i].event, occ[j].event, de.doc_id,
                                occ[i].sent_index, occ[j].sent_index, {}, {}};
        for (const ParsedSentence& s : doc->sentences) {
          if (s.sent_index < occ[i].sent_index || s.sent_index > occ[j].sent_index)
            continue;
          for (const Token& t : s.tokens) {
            if (s.sent_index == occ[i].sent_index && t.index <= occ[i].span_end) continue;
            if (s.sent_index == occ[j].sent_index && t.index >= occ[j].span_start) continue;
            ctx.lemmas.push_back((t.lemma.empty() || t.lemma == "_") ? to_lower(t.surface)
                                                                      : to_lower(t.lemma));
            ctx.pos.push_back(t.pos);
          }
        }
        (*contexts)[make_pair_key(occ[i].event, occ[j].event)].push_back(std::move(ctx));
      }
    }
  }
  return counts;
}

double pmi(double x_count, double y_count, double xy_count, double n, double eps) {
  if (!(n > 0)) throw DataError("pmi: N must be positive");
  return std::log(((xy_count + eps) * n) / ((x_count + eps) * (y_count + eps)));
}

double transition_probability(const std::string& a, const std::string& b,
                              const PairCounts& counts) {
  const long long fa = counts.event_count(a);
  if (fa == 0) throw NotFoundError("undefined event (zero frequency): " + a);
  return static_cast<double>(counts.before(a, b)) / static_cast<double>(fa);
}

std::pair<int, int> FeatureLayout::range(FeatureGroup g) const {
  switch (g) {
    case FeatureGroup::kFrequency:
      return {0, kFrequencySize};
    case FeatureGroup::kRatio:
      return {kFrequencySize, kRatioSize};
    case FeatureGroup::kContext:
      return {kFrequencySize + kRatioSize, context_size()};
    case FeatureGroup::kPmi:
      return {kFrequencySize + kRatioSize + context_size(), kPmiSize};
  }
  return {0, 0};
}

std::vector<int> FeatureLayout::columns(GroupMask mask) const {
  std::vector<int> out;
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    if ((mask & (1u << g)) == 0) continue;
    auto [offset, length] = range(static_cast<FeatureGroup>(g));
    for (int i = 0; i < length; ++i) out.push_back(offset + i);
  }
  return out;
}

std::vector<std::string> FeatureLayout::column_names(
    const std::vector<std::string>& pos_tags) const {
  std::vector<std::string> names;
  for (int i = 1; i <= kFrequencySize; ++i) names.push_back("T" + std::to_string(i));
  for (int i = 1; i <= kRatioSize; ++i) names.push_back("R" + std::to_string(i));
  names.push_back("C1");
  names.push_back("C2");
  for (int i = 0; i < dim; ++i) names.push_back("C3_" + std::to_string(i));
  for (int i = 0; i < pos_bins; ++i)
    names.push_back("C4_" + (i < static_cast<int>(pos_tags.size()) ? pos_tags[i]
                                                                   : std::string("OTHER")));
  for (int i = 0; i < 2 * dim; ++i) names.push_back("C5_" + std::to_string(i));
  for (int i = 1; i <= kPmiSize; ++i) names.push_back("A" + std::to_string(i));
  return names;
}

std::string mask_name(GroupMask mask) {
  static const char* kNames[] = {"frequency", "ratio", "context", "pmi"};
  std::vector<std::string> parts;
  for (int g = 0; g < kFeatureGroupCount; ++g)
    if (mask & (1u << g)) parts.emplace_back(kNames[g]);
  return parts.empty() ? "none" : join(parts, "+");
}

FeatureVector mask_groups(const FeatureVector& fv, GroupMask mask) {
  FeatureVector out = fv;
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    if (mask & (1u << g)) continue;
    auto [offset, length] = fv.layout.range(static_cast<FeatureGroup>(g));
    out.values.segment(offset, length).setZero();
  }
  return out;
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

FeatureVector build_feature_vector(const std::string& a, const std::string& b,
                                   const PairCounts& counts,
                                   std::span<const CoOccurrenceContext> contexts,
                                   const EmbeddingTable& table,
                                   const FeatureOptions& options) {
  if (!counts.has_pair(a, b))
    throw NotFoundError("pair not in counts: (" + a + ", " + b + ")");
  const EventTuple ea = EventTuple::from_key(a);
  const EventTuple eb = EventTuple::from_key(b);
  const std::string va = ea.predicate_key(), vb = eb.predicate_key();
  const std::string oa = ea.object_key(), ob = eb.object_key();

  FeatureVector fv;
  fv.a = a;
  fv.b = b;
  fv.layout = options.layout(table.dim());
  fv.values = Eigen::VectorXd::Zero(fv.layout.size());

  const double t1 = static_cast<double>(counts.together(a, b));
  const double t2 = static_cast<double>(counts.before(a, b));
  const double t3 = static_cast<double>(counts.before(b, a));
  const double t4 = static_cast<double>(counts.event_count(a));
  const double t5 = static_cast<double>(counts.event_count(b));
  const double t6 = static_cast<double>(counts.verb_count(va));
  const double t7 = static_cast<double>(counts.object_count(oa));
  const double t8 = static_cast<double>(counts.verb_count(vb));
  const double t9 = static_cast<double>(counts.object_count(ob));

  auto freq = fv.values.segment(0, FeatureLayout::kFrequencySize);
  freq << t1, t2, t3, t4, t5, t6, t7, t8, t9;

  auto ratios = fv.values.segment(FeatureLayout::kFrequencySize, FeatureLayout::kRatioSize);
  ratios << ratio(t2, t1), ratio(t1, t4), ratio(t1, t5), ratio(t1, t6), ratio(t1, t7),
      ratio(t1, t8), ratio(t1, t9), ratio(t6, t4), ratio(t7, t4), ratio(t8, t5),
      ratio(t9, t5);

  const int dim = table.dim();
  const auto [ctx_offset, ctx_length] = fv.layout.range(FeatureGroup::kContext);
  auto ctx = fv.values.segment(ctx_offset, ctx_length);
  const PairKey wanted = make_pair_key(a, b);
  std::size_t n_contexts = 0;
  double total_len = 0.0;
  Eigen::VectorXd emb_sum = Eigen::VectorXd::Zero(dim);
  int emb_used = 0;
  Eigen::VectorXd pos_hist = Eigen::VectorXd::Zero(fv.layout.pos_bins);
  for (const CoOccurrenceContext& c : contexts) {
    if (make_pair_key(c.earlier, c.later) != wanted) continue;
    ++n_contexts;
    total_len += static_cast<double>(c.lemmas.size());
    for (std::size_t i = 0; i < c.lemmas.size(); ++i) {
      int row = table.index_of(c.lemmas[i]);
      if (row >= 0) {
        emb_sum += table.vectors().row(row).transpose().cast<double>();
        ++emb_used;
      }
      const std::string& tag = i < c.pos.size() ? c.pos[i] : std::string();
      auto it = std::find(options.pos_inventory.begin(), options.pos_inventory.end(), tag);
      pos_hist[static_cast<int>(it - options.pos_inventory.begin())] += 1.0;
    }
  }
  ctx[0] = static_cast<double>(n_contexts);
  ctx[1] = n_contexts == 0 ? 0.0 : total_len / static_cast<double>(n_contexts);
  if (emb_used > 0) ctx.segment(2, dim) = emb_sum / static_cast<double>(emb_used);
  const double pos_total = pos_hist.sum();
  if (pos_total > 0) ctx.segment(2 + dim, fv.layout.pos_bins) = pos_hist / pos_total;
  ctx.segment(2 + dim + fv.layout.pos_bins, dim) = embed_event(ea, table).vec;
  ctx.segment(2 + 2 * dim + fv.layout.pos_bins, dim) = embed_event(eb, table).vec;

  const double n = static_cast<double>(std::max<long long>(counts.n_events(), 1));
  const auto [pmi_offset, pmi_length] = fv.layout.range(FeatureGroup::kPmi);
  auto p = fv.values.segment(pmi_offset, pmi_length);
  p << pmi(t6, t8, static_cast<double>(counts.verb_verb(va, vb)), n),
      pmi(t4, t5, t1, n),
      pmi(t6, t9, static_cast<double>(counts.verb_object(va, ob)), n),
      pmi(t7, t8, static_cast<double>(counts.verb_object(vb, oa)), n),
      pmi(t7, t9, static_cast<double>(counts.object_object(oa, ob)), n);
  return fv;
}

}  // namespace elg
