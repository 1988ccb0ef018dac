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


// Binary classifiers over dense feature matrices: Gaussian naive Bayes,
// L2 logistic regression, a one-hidden-layer tanh perceptron and a linear
// SVM trained with Pegasos. Labels are 0/1; rows are examples.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace elg {

enum class ClassifierKind { kNaiveBayes, kLogistic, kMlp, kSvm };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& name);  // nb|lr|mlp|svm

struct Hyperparams {
  double nb_variance_floor = 1e-9;

  double lr_learning_rate = 0.1;
  double lr_l2 = 1e-3;
  int lr_max_epochs = 500;
  double lr_tolerance = 1e-6;  // stop when the gradient norm drops below

  int mlp_hidden = 32;
  double mlp_learning_rate = 0.05;
  int mlp_epochs = 300;

  double svm_lambda = 1e-3;
  int svm_epochs = 200;
};

// z-score per column, fitted on training rows. Constant columns get scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct NaiveBayesParams {
  Eigen::Vector2d log_prior;
  Eigen::MatrixXd mean;      // 2 x d
  Eigen::MatrixXd variance;  // 2 x d, floored
};

struct LogisticParams {
  Eigen::VectorXd weights;
  double bias = 0.0;
  int epochs_run = 0;
};

struct MlpParams {
  Eigen::MatrixXd hidden_weights;  // h x d
  Eigen::VectorXd hidden_bias;
  Eigen::VectorXd output_weights;  // h
  double output_bias = 0.0;
};

struct SvmParams {
  Eigen::VectorXd weights;
  double bias = 0.0;
};

class ClassifierModel {
 public:
  ClassifierKind kind = ClassifierKind::kNaiveBayes;
  std::variant<NaiveBayesParams, LogisticParams, MlpParams, SvmParams> params;
  std::vector<int> columns;  // feature columns used, in order
  std::optional<Standardizer> standardization;

  // Positive-class probability for nb/lr/mlp; signed margin for svm.
  Eigen::VectorXd decision(const Eigen::MatrixXd& X) const;
  std::vector<int> predict(const Eigen::MatrixXd& X) const;
  // n x 2 class posteriors; naive Bayes only.
  Eigen::MatrixXd posterior(const Eigen::MatrixXd& X) const;

 private:
  Eigen::MatrixXd prepare(const Eigen::MatrixXd& X) const;
};

// `columns` selects feature columns (empty = all). Requires at least two
// examples of each class; throws TrainingError on degenerate input or a
// non-finite loss.
ClassifierModel train_classifier(ClassifierKind kind, const Eigen::MatrixXd& X,
                                 std::span<const int> y, const Hyperparams& hyper,
                                 std::uint64_t seed, std::vector<int> columns = {});

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<int>& columns);

}  // namespace elg
