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


// Multiple-choice narrative cloze: instance generation, scorers and
// evaluation with paired significance tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elg/embeddings.hpp"
#include "elg/events.hpp"
#include "elg/graph.hpp"
#include "elg/pairstats.hpp"

namespace elg {

// Events of one document (or a window of one) in text order.
struct EventChain {
  std::string id;
  std::vector<std::string> events;
};

// Splits each document into consecutive windows of at most `max_length`
// events; windows shorter than 2 are dropped. max_length 0 = whole document.
std::vector<EventChain> chains_from_documents(std::span<const DocumentEvents> docs,
                                              std::size_t max_length = 0);

struct McncInstance {
  std::string chain_id;
  std::vector<std::string> context;
  std::vector<std::string> candidates;
  std::size_t answer_index = 0;

  const std::string& answer() const { return candidates[answer_index]; }
  bool operator==(const McncInstance&) const = default;
};

enum class DistractorPolicy { kFrequency, kUniform };
DistractorPolicy parse_distractor_policy(const std::string& name);

struct McncOptions {
  std::size_t n_candidates = 5;
  std::uint64_t seed = 1;
  DistractorPolicy policy = DistractorPolicy::kFrequency;
};

// Context = all but the last chain event, answer = the last. Distractors are
// drawn without replacement from `vocabulary` minus context and answer.
// Throws DataError when a chain references an unknown event or the pool is
// too small.
std::vector<McncInstance> generate_mcnc(std::span<const EventChain> chains,
                                        const std::map<std::string, long long>& vocabulary,
                                        const McncOptions& options = {});

// "ctx1 ctx2 ... <TAB> cand1 ... candN <TAB> answer_index", one per line.
std::string serialize_mcnc(std::span<const McncInstance> instances);
std::vector<McncInstance> parse_mcnc(const std::string& text);

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  // One score per candidate. `instance_index` only seeds stochastic scorers.
  virtual std::vector<double> score(const McncInstance& instance,
                                    std::size_t instance_index) const = 0;
};

// Highest score; ties go to the lowest index.
std::size_t argmax_choice(std::span<const double> scores);

class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  std::vector<double> score(const McncInstance& instance, std::size_t index) const override;

 private:
  std::uint64_t seed_;
};

// Sum over context events of smoothed pmi(context, candidate) with joint
// counts from matched co-occurrences.
class PmiScorer : public Scorer {
 public:
  explicit PmiScorer(const PairCounts& counts, double eps = 1.0)
      : counts_(&counts), eps_(eps) {}
  std::string name() const override { return "pmi"; }
  std::vector<double> score(const McncInstance& instance, std::size_t index) const override;

 private:
  const PairCounts* counts_;
  double eps_;
};

// Sum over context events c of log((count(c before x) + 1) / (count(c) + V)).
class BigramScorer : public Scorer {
 public:
  explicit BigramScorer(const PairCounts& counts) : counts_(&counts) {}
  std::string name() const override { return "bigram"; }
  std::vector<double> score(const McncInstance& instance, std::size_t index) const override;

 private:
  const PairCounts* counts_;
};

// Cosine between the candidate vector and the mean context vector.
class EmbeddingScorer : public Scorer {
 public:
  explicit EmbeddingScorer(const EmbeddingTable& table) : table_(&table) {}
  std::string name() const override { return "embedding"; }
  std::vector<double> score(const McncInstance& instance, std::size_t index) const override;

 private:
  const EmbeddingTable* table_;
};

struct GraphScorerOptions {
  double beta = 0.1;
  // Keys absent from the graph resolve to the most similar node at or above
  // this cosine when a table is supplied.
  double resolve_threshold = 0.6;
};

// Sum of sequential transition probabilities from context nodes to the
// candidate node, plus beta when the candidate shares a strongly connected
// component with a context node. A node without edges stands in for its
// best similarity-linked neighbor.
class GraphScorer : public Scorer {
 public:
  GraphScorer(const ElgGraph& graph, GraphScorerOptions options = {},
              const EmbeddingTable* table = nullptr);
  std::string name() const override { return "graph"; }
  std::vector<double> score(const McncInstance& instance, std::size_t index) const override;

  std::optional<int> resolve(const std::string& key) const;

 private:
  const ElgGraph* graph_;
  GraphScorerOptions options_;
  const EmbeddingTable* table_;
  GraphIndex index_;
  std::vector<int> component_;
  std::vector<char> has_edges_;
  std::vector<EventVector> node_vectors_;
};

struct McncEvaluation {
  std::string method;
  double accuracy = 0.0;  // percent
  std::vector<std::size_t> chosen;
  std::vector<int> correct;  // 0/1 per instance
  std::vector<std::vector<double>> scores;
};

// Throws DataError for an empty instance list.
McncEvaluation evaluate_mcnc(const Scorer& scorer, std::span<const McncInstance> instances);

// Two-sided paired t-test over per-instance values. Identical inputs give 1.
double paired_t_test(std::span<const int> a, std::span<const int> b);

// Methods / Accuracy table; p-values are against the most accurate method.
std::string format_mcnc_report(std::span<const McncEvaluation> results);

}  // namespace elg
