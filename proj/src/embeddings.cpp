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


#include "elg/embeddings.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "elg/util.hpp"

namespace elg {

EmbeddingTable::EmbeddingTable(std::vector<std::string> words,
                               Eigen::MatrixXf vectors, SkipGramOptions meta)
    : words_(std::move(words)), vectors_(std::move(vectors)), meta_(meta) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows())
    throw DataError("embedding table: vocabulary and matrix row count differ");
  if (!words_.empty() && vectors_.cols() < 1)
    throw DataError("embedding table: dim must be >= 1");
  if (!vectors_.allFinite()) throw DataError("embedding table: non-finite entry");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!vocab_.emplace(words_[i], static_cast<int>(i)).second)
      throw DataError("embedding table: duplicate word " + words_[i]);
  }
  meta_.dim = static_cast<int>(vectors_.cols());
}

int EmbeddingTable::index_of(const std::string& word) const {
  auto it = vocab_.find(word);
  return it == vocab_.end() ? -1 : it->second;
}

Eigen::VectorXf EmbeddingTable::vector(const std::string& word) const {
  int i = index_of(word);
  if (i < 0) return Eigen::VectorXf::Zero(dim());
  return vectors_.row(i).transpose();
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
  return words_ == other.words_ && vectors_.rows() == other.vectors_.rows() &&
         vectors_.cols() == other.vectors_.cols() && vectors_ == other.vectors_;
}

namespace {

float sigmoid(float x) {
  if (x > 30.0f) return 1.0f;
  if (x < -30.0f) return 0.0f;
  return 1.0f / (1.0f + std::exp(-x));
}

}  // namespace

EmbeddingTable train_skipgram(const ParsedCorpus& corpus,
                              const SkipGramOptions& options, TrainReport* report) {
  if (options.dim < 1) throw ConfigError("skip-gram dim must be >= 1");
  if (options.window < 1) throw ConfigError("skip-gram window must be >= 1");
  if (options.epochs < 1) throw ConfigError("skip-gram epochs must be >= 1");

  std::map<std::string, long long> counts;
  std::vector<std::vector<std::string>> sentences;
  for (const Document& d : corpus.documents) {
    for (const ParsedSentence& s : d.sentences) {
      std::vector<std::string> lemmas;
      for (const Token& t : s.tokens) {
        if (t.pos == "PUNCT") continue;
        std::string l = (t.lemma.empty() || t.lemma == "_") ? to_lower(t.surface)
                                                             : to_lower(t.lemma);
        ++counts[l];
        lemmas.push_back(std::move(l));
      }
      sentences.push_back(std::move(lemmas));
    }
  }
  if (counts.empty()) throw EmptyCorpusError("skip-gram: empty corpus");

  std::vector<std::pair<std::string, long long>> kept;
  for (const auto& [w, c] : counts)
    if (c >= options.min_count) kept.emplace_back(w, c);
  if (kept.empty())
    throw DataError("skip-gram: no word reaches min_count " +
                    std::to_string(options.min_count));
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  for (const auto& [w, c] : kept) {
    index.emplace(w, static_cast<int>(words.size()));
    words.push_back(w);
  }
  const int vocab = static_cast<int>(words.size());
  const int dim = options.dim;

  // Noise distribution: cumulative unigram^0.75.
  std::vector<double> cumulative(vocab);
  double total = 0.0;
  for (int i = 0; i < vocab; ++i) {
    total += std::pow(static_cast<double>(kept[i].second), 0.75);
    cumulative[i] = total;
  }

  std::vector<std::vector<int>> encoded;
  std::size_t train_words = 0;
  for (const auto& s : sentences) {
    std::vector<int> ids;
    for (const std::string& l : s) {
      auto it = index.find(l);
      if (it != index.end()) ids.push_back(it->second);
    }
    train_words += ids.size();
    encoded.push_back(std::move(ids));
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_noise = [&] {
    double r = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), vocab - 1));
  };

  Eigen::MatrixXf input(vocab, dim);
  for (int i = 0; i < vocab; ++i)
    for (int j = 0; j < dim; ++j)
      input(i, j) = static_cast<float>((unit(rng) - 0.5) / dim);
  Eigen::MatrixXf output = Eigen::MatrixXf::Zero(vocab, dim);

  // Pair count per epoch depends on the random window shrink, so chunking
  // uses the expected upper bound and flushes the tail.
  std::size_t max_pairs = 0;
  for (const auto& s : encoded) {
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = i >= static_cast<std::size_t>(options.window) ? i - options.window : 0;
      std::size_t hi = std::min(n - 1, i + options.window);
      max_pairs += hi - lo;
    }
  }
  const std::size_t chunk = std::max<std::size_t>(1, max_pairs / 20);

  TrainReport local;
  local.pairs_per_epoch = max_pairs;
  const double total_steps = static_cast<double>(options.epochs) *
                             static_cast<double>(std::max<std::size_t>(train_words, 1));
  std::size_t step = 0;
  Eigen::VectorXf grad(dim);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    double chunk_loss = 0.0;
    std::size_t chunk_pairs = 0;
    for (const auto& s : encoded) {
      const int n = static_cast<int>(s.size());
      for (int i = 0; i < n; ++i, ++step) {
        const float alpha = static_cast<float>(std::max(
            options.learning_rate * 1e-4,
            options.learning_rate * (1.0 - static_cast<double>(step) / total_steps)));
        const int shrink = static_cast<int>(unit(rng) * options.window);
        const int reach = options.window - std::min(shrink, options.window - 1);
        for (int j = std::max(0, i - reach); j <= std::min(n - 1, i + reach); ++j) {
          if (j == i) continue;
          const int center = s[i];
          grad.setZero();
          double loss = 0.0;
          for (int k = 0; k <= options.negative_samples; ++k) {
            int target;
            float label;
            if (k == 0) {
              target = s[j];
              label = 1.0f;
            } else {
              target = sample_noise();
              if (target == s[j]) continue;
              label = 0.0f;
            }
            const float score = input.row(center).dot(output.row(target));
            const float p = sigmoid(score);
            loss -= label > 0.5f ? std::log(std::max(p, 1e-7f))
                                 : std::log(std::max(1.0f - p, 1e-7f));
            const float g = (label - p) * alpha;
            grad += g * output.row(target).transpose();
            output.row(target) += g * input.row(center);
          }
          input.row(center) += grad.transpose();
          chunk_loss += loss;
          if (++chunk_pairs == chunk) {
            local.loss_trace.push_back(chunk_loss / static_cast<double>(chunk_pairs));
            chunk_loss = 0.0;
            chunk_pairs = 0;
          }
        }
      }
    }
    if (chunk_pairs > 0)
      local.loss_trace.push_back(chunk_loss / static_cast<double>(chunk_pairs));
  }
  if (!input.allFinite()) throw TrainingError("skip-gram training diverged");

  SkipGramOptions meta = options;
  if (report != nullptr) *report = std::move(local);
  return EmbeddingTable(std::move(words), std::move(input), meta);
}

std::string serialize_vectors(const EmbeddingTable& table) {
  std::ostringstream out;
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (int j = 0; j < table.dim(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf),
                                     table.vectors()(static_cast<Eigen::Index>(i), j));
      out << ' ' << std::string_view(buf, ptr - buf);
    }
    out << '\n';
  }
  return out.str();
}

EmbeddingTable parse_vectors(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw DataError("vector file: missing header");
  std::vector<std::string> h = split(trim(header), ' ');
  long long rows = 0, cols = 0;
  if (h.size() != 2 || !parse_int(h[0], rows) || !parse_int(h[1], cols) || rows < 0 ||
      cols < 1)
    throw DataError("vector file: bad header '" + header + "'");
  std::vector<std::string> words;
  Eigen::MatrixXf m(rows, cols);
  std::string line;
  for (long long r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw DataError("vector file: expected " + std::to_string(rows) + " rows");
    std::vector<std::string> f = split(trim(line), ' ');
    if (static_cast<long long>(f.size()) != cols + 1)
      throw DataError("vector file: row " + std::to_string(r + 1) + " has wrong width");
    words.push_back(f[0]);
    for (long long c = 0; c < cols; ++c) {
      float v = 0;
      auto [ptr, ec] = std::from_chars(f[c + 1].data(), f[c + 1].data() + f[c + 1].size(), v);
      if (ec != std::errc() || ptr != f[c + 1].data() + f[c + 1].size())
        throw DataError("vector file: bad number '" + f[c + 1] + "'");
      m(r, c) = v;
    }
  }
  return EmbeddingTable(std::move(words), std::move(m));
}

void save_vectors(const EmbeddingTable& table, const std::filesystem::path& path) {
  write_file(path, serialize_vectors(table));
}

EmbeddingTable load_vectors(const std::filesystem::path& path) {
  return parse_vectors(read_file(path));
}

EventVector embed_event(const EventTuple& event, const EmbeddingTable& table) {
  EventVector out{event.key(), Eigen::VectorXd::Zero(std::max(table.dim(), 0)), true};
  int used = 0;
  for (const auto* slot : {&event.subject, &event.predicate, &event.object}) {
    for (const std::string& lemma : *slot) {
      int i = table.index_of(lemma);
      if (i < 0) continue;
      out.vec += table.vectors().row(i).transpose().cast<double>();
      ++used;
    }
  }
  if (used > 0) {
    out.vec /= static_cast<double>(used);
    out.oov = false;
  }
  return out;
}

EventVector embed_event(const std::string& event_key, const EmbeddingTable& table) {
  return embed_event(EventTuple::from_key(event_key), table);
}

}  // namespace elg
