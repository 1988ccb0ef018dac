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


// Skip-gram word embeddings and composed event vectors.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "elg/corpus.hpp"
#include "elg/error.hpp"
#include "elg/events.hpp"

namespace elg {

struct SkipGramOptions {
  int dim = 100;
  int window = 5;
  int epochs = 5;
  int negative_samples = 5;
  int min_count = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

// Row i of `vectors` belongs to words()[i].
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXf vectors,
                 SkipGramOptions meta = {});

  int dim() const { return static_cast<int>(vectors_.cols()); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const Eigen::MatrixXf& vectors() const { return vectors_; }
  const SkipGramOptions& meta() const { return meta_; }

  // -1 when out of vocabulary.
  int index_of(const std::string& word) const;
  bool contains(const std::string& word) const { return index_of(word) >= 0; }
  Eigen::VectorXf vector(const std::string& word) const;

  bool operator==(const EmbeddingTable& other) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> vocab_;
  Eigen::MatrixXf vectors_;
  SkipGramOptions meta_;
};

struct TrainReport {
  // Mean negative-sampling loss over consecutive chunks of training pairs,
  // 20 chunks per epoch.
  std::vector<double> loss_trace;
  std::size_t pairs_per_epoch = 0;
};

// Single-worker SGNS with a linearly decaying learning rate and the usual
// unigram^0.75 noise distribution. Deterministic for a given seed.
EmbeddingTable train_skipgram(const ParsedCorpus& corpus,
                              const SkipGramOptions& options,
                              TrainReport* report = nullptr);

// Text vector format: "<vocab_size> <dim>" then "<word> <floats...>" lines.
void save_vectors(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_vectors(const std::filesystem::path& path);
std::string serialize_vectors(const EmbeddingTable& table);
EmbeddingTable parse_vectors(const std::string& text);

struct EventVector {
  std::string event;
  Eigen::VectorXd vec;
  bool oov = false;  // no slot lemma was in vocabulary; vec is zero
};

// Unweighted mean over the in-vocabulary lemmas of all three slots.
EventVector embed_event(const EventTuple& event, const EmbeddingTable& table);
EventVector embed_event(const std::string& event_key, const EmbeddingTable& table);

// Cosine similarity in double precision; 0 when either side is all-zero.
template <typename DerivedA, typename DerivedB>
double cosine(const Eigen::MatrixBase<DerivedA>& u,
              const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size())
    throw DataError("cosine: dimension mismatch " + std::to_string(u.size()) +
                    " vs " + std::to_string(v.size()));
  const auto ud = u.template cast<double>();
  const auto vd = v.template cast<double>();
  const double nu = ud.norm();
  const double nv = vd.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = ud.dot(vd) / (nu * nv);
  return std::max(-1.0, std::min(1.0, c));
}

}  // namespace elg
