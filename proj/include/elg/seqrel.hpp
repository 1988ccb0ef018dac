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


// Sequential relation and direction recognition: annotated pair datasets,
// baselines, oversampling, stratified repeated cross-validation and
// feature-group search.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elg/classifiers.hpp"
#include "elg/metrics.hpp"
#include "elg/pairstats.hpp"

namespace elg {

enum class Direction { kForward, kBackward };

// One line of an annotation file: "keyA <TAB> keyB <TAB> relation <TAB> direction"
// with relation in {positive, negative} and direction in {forward, backward, -}.
struct AnnotatedPair {
  std::string a;
  std::string b;
  bool positive = false;
  std::optional<Direction> direction;
};

std::vector<AnnotatedPair> parse_annotations(const std::string& text);
std::vector<AnnotatedPair> load_annotations(const std::filesystem::path& path);
std::string serialize_annotations(std::span<const AnnotatedPair> pairs);

struct LabeledPair {
  std::string a;
  std::string b;
  FeatureVector features;
  bool positive = false;
  std::optional<Direction> direction;  // present iff positive
};

// Orients every pair so that count(a before b) >= count(b before a),
// flipping the direction label when swapping, and builds its features.
// Pairs that never co-occur are skipped.
std::vector<LabeledPair> label_pairs(std::span<const AnnotatedPair> annotations,
                                     const PairCounts& counts,
                                     const ContextIndex& contexts,
                                     const EmbeddingTable& table,
                                     const FeatureOptions& options = {});

enum class Task { kRelation, kDirection };

struct Dataset {
  Eigen::MatrixXd X;
  std::vector<int> y;
  FeatureLayout layout;
  std::vector<std::string> ids;

  std::size_t size() const { return y.size(); }
  // Relation: all pairs, y = positive. Direction: positive pairs, y = forward.
  static Dataset from_pairs(std::span<const LabeledPair> pairs, Task task);
};

// Predicts positive iff A2 (pair PMI) >= threshold.
std::vector<int> pmi_threshold_baseline(std::span<const LabeledPair> pairs,
                                        double threshold);
// Threshold maximizing training accuracy; candidates are -inf and midpoints
// between sorted distinct scores, first maximum wins.
double fit_pmi_threshold(std::span<const double> scores, std::span<const int> labels);
// Forward for every pair.
std::vector<Direction> preceding_assumption_baseline(std::span<const LabeledPair> pairs);

// Resamples the minority class with replacement until both classes have the
// same count; originals are kept first. Throws DataError for single-class input.
std::vector<LabeledPair> oversample(std::span<const LabeledPair> train, std::uint64_t seed);
std::vector<std::size_t> oversample_rows(std::span<const std::size_t> rows,
                                         std::span<const int> labels, std::uint64_t seed);

// A learner sees only training rows when fitting.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual std::vector<int> fit_predict(const Eigen::MatrixXd& X_train,
                                       std::span<const int> y_train,
                                       const Eigen::MatrixXd& X_test,
                                       std::uint64_t seed) const = 0;
};

class ClassifierLearner : public Learner {
 public:
  ClassifierLearner(ClassifierKind kind, Hyperparams hyper, std::vector<int> columns = {})
      : kind_(kind), hyper_(hyper), columns_(std::move(columns)) {}
  std::string name() const override { return to_string(kind_); }
  std::vector<int> fit_predict(const Eigen::MatrixXd& X_train, std::span<const int> y_train,
                               const Eigen::MatrixXd& X_test,
                               std::uint64_t seed) const override;

 private:
  ClassifierKind kind_;
  Hyperparams hyper_;
  std::vector<int> columns_;
};

class ConstantLearner : public Learner {
 public:
  explicit ConstantLearner(int label) : label_(label) {}
  std::string name() const override { return "constant"; }
  std::vector<int> fit_predict(const Eigen::MatrixXd&, std::span<const int>,
                               const Eigen::MatrixXd& X_test,
                               std::uint64_t) const override {
    return std::vector<int>(static_cast<std::size_t>(X_test.rows()), label_);
  }

 private:
  int label_;
};

// Fits the PMI threshold on the training fold using column `pmi_column`.
class PmiThresholdLearner : public Learner {
 public:
  explicit PmiThresholdLearner(int pmi_column) : column_(pmi_column) {}
  std::string name() const override { return "pmi"; }
  std::vector<int> fit_predict(const Eigen::MatrixXd& X_train, std::span<const int> y_train,
                               const Eigen::MatrixXd& X_test,
                               std::uint64_t seed) const override;

 private:
  int column_;
};

// Row indices handed to a learner for one fold (after oversampling).
struct FoldAudit {
  int repeat = 0;
  int fold = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

struct CvOptions {
  int folds = 5;
  int repeats = 10;
  std::uint64_t seed = 1;
  bool oversample_training = true;
  std::function<void(const FoldAudit&)> audit;
};

// Stratified assignment of rows to folds for one repeat; fold sizes differ
// by at most one.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                       int folds, std::uint64_t seed);

// Confusion counts are pooled over folds and repeats; fold_values holds the
// per-fold accuracy. Throws DataError when the dataset has fewer rows than
// folds.
EvalMetrics cross_validate(const Learner& learner, const Dataset& data,
                           const CvOptions& options = {});

struct SearchRow {
  std::string classifier;
  GroupMask mask = 0;
  EvalMetrics metrics;
};

struct SearchResult {
  std::vector<SearchRow> rows;  // classifier-major, masks 1..15 ascending
  std::vector<SearchRow> best;  // one per classifier, input order
};

using LearnerFactory = std::function<std::unique_ptr<Learner>(GroupMask)>;

// Evaluates all 15 nonempty group subsets per learner. Best = highest
// accuracy, then F1, then the numerically smallest mask.
SearchResult feature_group_search(
    const std::vector<std::pair<std::string, LearnerFactory>>& learners,
    const Dataset& data, const CvOptions& options = {});

LearnerFactory classifier_factory(ClassifierKind kind, const Hyperparams& hyper,
                                  const FeatureLayout& layout);

struct ReportRow {
  std::string features;
  std::string classifier;
  EvalMetrics metrics;
};

// Human table with Features, Classifier, Accuracy, Precision, Recall, F1.
std::string format_report(std::span<const ReportRow> rows);
std::string report_tsv(std::span<const ReportRow> rows);

}  // namespace elg
