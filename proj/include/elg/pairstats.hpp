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


// Event co-occurrence statistics, pair features and transition
// probabilities.
//
// Counting pairs occurrences one-to-one: scanning a document in text order,
// each occurrence is matched with the nearest earlier occurrence of every
// other event key within the sentence window, provided neither occurrence is
// already matched with that partner key. Hence for every pair
//   t1 = t2 + t3,  t2 <= count(A),  t1 <= min(count(A), count(B)),
// and count(A before B) / count(A) is a probability.

#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "elg/corpus.hpp"
#include "elg/embeddings.hpp"
#include "elg/events.hpp"

namespace elg {

// Unordered pair stored with first < second.
using PairKey = std::pair<std::string, std::string>;
PairKey make_pair_key(const std::string& a, const std::string& b);

class PairCounts {
 public:
  void add_occurrence(const std::string& event_key);
  // One matched instance with `earlier` preceding `later` in text.
  void add_match(const std::string& earlier, const std::string& later);
  void add_tokens(long long n) { n_tokens_ += n; }

  // Associative, commutative accumulation of disjoint document sets.
  void merge(const PairCounts& other);

  long long event_count(const std::string& key) const;     // T4 / T5
  long long verb_count(const std::string& verb) const;     // T6 / T8
  long long object_count(const std::string& object) const;  // T7 / T9
  // Instances with `a` before `b` (T2 for (a, b), T3 for (b, a)).
  long long before(const std::string& a, const std::string& b) const;
  long long together(const std::string& a, const std::string& b) const;  // T1
  bool has_pair(const std::string& a, const std::string& b) const {
    return together(a, b) > 0;
  }

  // Matched instances in which one event has verb `u` and the other verb `v`.
  long long verb_verb(const std::string& u, const std::string& v) const;
  // ... one event has verb `verb` and the other object `object`.
  long long verb_object(const std::string& verb, const std::string& object) const;
  long long object_object(const std::string& u, const std::string& v) const;

  long long n_events() const { return n_events_; }
  long long n_pairs() const { return n_pairs_; }
  long long n_tokens() const { return n_tokens_; }

  const std::map<std::string, long long>& events() const { return events_; }
  // Keyed by unordered pair; value is (first before second, second before first).
  const std::map<PairKey, std::pair<long long, long long>>& pairs() const {
    return pairs_;
  }

  // Sectioned TSV: [TOTALS], [EVENTS] (key, t4, t_verb, t_obj) and
  // [PAIRS] (keyA, keyB, t1, t2, t3) in lexicographic order.
  std::string serialize() const;
  static PairCounts parse(const std::string& text);

  bool operator==(const PairCounts& other) const;

 private:
  void add_argument_pairs(const std::string& a, const std::string& b, long long n);

  std::map<std::string, long long> events_;
  std::map<std::string, long long> verbs_;
  std::map<std::string, long long> objects_;
  std::map<PairKey, std::pair<long long, long long>> pairs_;
  std::map<PairKey, long long> verb_verb_;
  std::map<PairKey, long long> verb_object_;  // (verb, object), ordered
  std::map<PairKey, long long> object_object_;
  long long n_events_ = 0;
  long long n_pairs_ = 0;
  long long n_tokens_ = 0;
};

// Tokens strictly between two matched occurrences, in text order.
struct CoOccurrenceContext {
  std::string earlier;
  std::string later;
  std::string doc_id;
  int first_sentence = 0;
  int last_sentence = 0;
  std::vector<std::string> lemmas;
  std::vector<std::string> pos;
};

using ContextIndex = std::map<PairKey, std::vector<CoOccurrenceContext>>;

struct CountOptions {
  int window_sentences = 5;
};

// Counts events, matched pairs and (when `corpus` is given) tokens. Contexts
// are recorded into `contexts` when both it and `corpus` are non-null.
PairCounts count_pairs(std::span<const DocumentEvents> docs,
                       const CountOptions& options = {},
                       const ParsedCorpus* corpus = nullptr,
                       ContextIndex* contexts = nullptr);

// log(((xy + eps) * n) / ((x + eps) * (y + eps))). Requires n > 0.
double pmi(double x_count, double y_count, double xy_count, double n,
           double eps = 1.0);

// count(A before B) / count(A). Throws NotFoundError when count(A) == 0.
double transition_probability(const std::string& a, const std::string& b,
                              const PairCounts& counts);

enum class FeatureGroup { kFrequency = 0, kRatio = 1, kContext = 2, kPmi = 3 };
inline constexpr int kFeatureGroupCount = 4;

// Bit set over FeatureGroup; bit g set means group g is enabled.
using GroupMask = unsigned;
inline constexpr GroupMask kAllGroups = 0xF;
inline constexpr GroupMask group_bit(FeatureGroup g) {
  return 1u << static_cast<unsigned>(g);
}
std::string mask_name(GroupMask mask);

// Column layout. Context block = C1, C2, C3 (dim), C4 (POS bins), C5 (2*dim).
struct FeatureLayout {
  int dim = 0;
  int pos_bins = 0;

  static constexpr int kFrequencySize = 9;
  static constexpr int kRatioSize = 11;
  static constexpr int kPmiSize = 5;

  int context_size() const { return 2 + dim + pos_bins + 2 * dim; }
  int size() const { return kFrequencySize + kRatioSize + context_size() + kPmiSize; }
  // (offset, length) of a group's block.
  std::pair<int, int> range(FeatureGroup g) const;
  // Column indices enabled by `mask`, ascending.
  std::vector<int> columns(GroupMask mask) const;
  std::vector<std::string> column_names(const std::vector<std::string>& pos_tags) const;

  bool operator==(const FeatureLayout&) const = default;
};

struct FeatureOptions {
  // C4 bins; tags outside the inventory fall into one extra trailing bin.
  std::vector<std::string> pos_inventory{"ADJ", "ADP", "ADV", "AUX", "CCONJ",
                                         "DET", "INTJ", "NOUN", "NUM", "PART",
                                         "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",
                                         "VERB", "X"};
  FeatureLayout layout(int dim) const {
    return FeatureLayout{dim, static_cast<int>(pos_inventory.size()) + 1};
  }
};

struct FeatureVector {
  std::string a;
  std::string b;
  FeatureLayout layout;
  Eigen::VectorXd values;

  auto group(FeatureGroup g) const {
    auto [offset, length] = layout.range(g);
    return values.segment(offset, length);
  }
};

// Zeroes every group not in `mask`; other entries are untouched.
FeatureVector mask_groups(const FeatureVector& fv, GroupMask mask);

// Contexts may hold either orientation of the pair. Throws NotFoundError
// when the pair never co-occurs.
FeatureVector build_feature_vector(const std::string& a, const std::string& b,
                                   const PairCounts& counts,
                                   std::span<const CoOccurrenceContext> contexts,
                                   const EmbeddingTable& table,
                                   const FeatureOptions& options = {});

}  // namespace elg
