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


#include "elg/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "elg/error.hpp"

namespace elg {

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kNaiveBayes:
      return "nb";
    case ClassifierKind::kLogistic:
      return "lr";
    case ClassifierKind::kMlp:
      return "mlp";
    case ClassifierKind::kSvm:
      return "svm";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "nb") return ClassifierKind::kNaiveBayes;
  if (name == "lr") return ClassifierKind::kLogistic;
  if (name == "mlp") return ClassifierKind::kMlp;
  if (name == "svm") return ClassifierKind::kSvm;
  throw ConfigError("unknown classifier: " + name);
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  const double n = static_cast<double>(std::max<Eigen::Index>(X.rows(), 1));
  s.mean = X.colwise().sum() / n;
  s.scale = ((X.rowwise() - s.mean).array().square().colwise().sum() / n).sqrt();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j)
    if (!(s.scale[j] > 1e-12)) s.scale[j] = 1.0;
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<int>& columns) {
  if (columns.empty()) return X;
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.col(j) = X.col(columns[j]);
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

double log_loss(const Eigen::VectorXd& p, std::span<const int> y) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], 1e-15, 1.0 - 1e-15);
    loss -= y[i] != 0 ? std::log(q) : std::log(1.0 - q);
  }
  return loss / static_cast<double>(std::max<Eigen::Index>(p.size(), 1));
}

NaiveBayesParams fit_nb(const Eigen::MatrixXd& X, std::span<const int> y,
                        const Hyperparams& h) {
  const Eigen::Index d = X.cols();
  NaiveBayesParams p;
  p.mean = Eigen::MatrixXd::Zero(2, d);
  p.variance = Eigen::MatrixXd::Zero(2, d);
  Eigen::Vector2d n = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int c = y[i] != 0 ? 1 : 0;
    p.mean.row(c) += X.row(i);
    n[c] += 1.0;
  }
  p.mean.row(0) /= n[0];
  p.mean.row(1) /= n[1];
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int c = y[i] != 0 ? 1 : 0;
    p.variance.row(c) += (X.row(i) - p.mean.row(c)).array().square().matrix();
  }
  p.variance.row(0) /= n[0];
  p.variance.row(1) /= n[1];
  p.variance = p.variance.cwiseMax(h.nb_variance_floor);
  p.log_prior = (n / n.sum()).array().log().matrix();
  return p;
}

Eigen::MatrixXd nb_log_joint(const NaiveBayesParams& p, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out(X.rows(), 2);
  constexpr double kLog2Pi = 1.8378770664093453;
  for (int c = 0; c < 2; ++c) {
    const double log_norm = -0.5 * (p.variance.row(c).array().log() + kLog2Pi).sum();
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double quad =
          ((X.row(i) - p.mean.row(c)).array().square() / p.variance.row(c).array()).sum();
      out(i, c) = p.log_prior[c] + log_norm - 0.5 * quad;
    }
  }
  return out;
}

LogisticParams fit_lr(const Eigen::MatrixXd& X, std::span<const int> y,
                      const Hyperparams& h) {
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd target(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) target[i] = y[i] != 0 ? 1.0 : 0.0;
  LogisticParams p;
  p.weights = Eigen::VectorXd::Zero(X.cols());
  for (int epoch = 0; epoch < h.lr_max_epochs; ++epoch) {
    const Eigen::VectorXd prob = sigmoid((X * p.weights).array() + p.bias);
    const Eigen::VectorXd err = prob - target;
    const Eigen::VectorXd gw = X.transpose() * err / n + h.lr_l2 * p.weights;
    const double gb = err.sum() / n;
    p.epochs_run = epoch + 1;
    if (!std::isfinite(log_loss(prob, y)))
      throw TrainingError("logistic regression diverged");
    if (std::sqrt(gw.squaredNorm() + gb * gb) < h.lr_tolerance) break;
    p.weights -= h.lr_learning_rate * gw;
    p.bias -= h.lr_learning_rate * gb;
  }
  return p;
}

MlpParams fit_mlp(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& h,
                  std::uint64_t seed) {
  const Eigen::Index d = X.cols();
  const int hidden = h.mlp_hidden;
  std::mt19937_64 rng(seed);
  MlpParams p;
  const double a1 = std::sqrt(6.0 / static_cast<double>(d + hidden));
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  p.hidden_weights.resize(hidden, d);
  for (Eigen::Index i = 0; i < p.hidden_weights.size(); ++i) p.hidden_weights.data()[i] = u1(rng);
  p.hidden_bias = Eigen::VectorXd::Zero(hidden);
  p.output_weights.resize(hidden);
  for (int i = 0; i < hidden; ++i) p.output_weights[i] = u2(rng);

  std::vector<Eigen::Index> order(X.rows());
  std::iota(order.begin(), order.end(), 0);
  const double lr = h.mlp_learning_rate;
  for (int epoch = 0; epoch < h.mlp_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (Eigen::Index i : order) {
      const Eigen::VectorXd x = X.row(i).transpose();
      const Eigen::VectorXd act =
          (p.hidden_weights * x + p.hidden_bias).array().tanh().matrix();
      const double out = sigmoid(act.dot(p.output_weights) + p.output_bias);
      const double t = y[i] != 0 ? 1.0 : 0.0;
      const double q = std::clamp(out, 1e-15, 1.0 - 1e-15);
      loss -= t > 0.5 ? std::log(q) : std::log(1.0 - q);
      const double delta = out - t;
      const Eigen::VectorXd back =
          (delta * p.output_weights).cwiseProduct((1.0 - act.array().square()).matrix());
      p.output_weights -= lr * delta * act;
      p.output_bias -= lr * delta;
      p.hidden_weights -= lr * back * x.transpose();
      p.hidden_bias -= lr * back;
    }
    if (!std::isfinite(loss)) throw TrainingError("mlp training diverged");
  }
  return p;
}

SvmParams fit_svm(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& h,
                  std::uint64_t seed) {
  // Pegasos on the bias-augmented input [x, 1].
  const Eigen::Index d = X.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(X.rows());
  std::iota(order.begin(), order.end(), 0);
  const double lambda = h.svm_lambda;
  const double radius = 1.0 / std::sqrt(lambda);
  long long t = 0;
  Eigen::VectorXd x(d + 1);
  for (int epoch = 0; epoch < h.svm_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      x.head(d) = X.row(i).transpose();
      x[d] = 1.0;
      const double label = y[i] != 0 ? 1.0 : -1.0;
      const double margin = label * w.dot(x);
      w *= 1.0 - eta * lambda;
      if (margin < 1.0) w += eta * label * x;
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
    }
    if (!w.allFinite()) throw TrainingError("svm training diverged");
  }
  return SvmParams{w.head(d), w[d]};
}

}  // namespace

Eigen::MatrixXd ClassifierModel::prepare(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd sel = select_columns(X, columns);
  return standardization ? standardization->apply(sel) : sel;
}

Eigen::MatrixXd ClassifierModel::posterior(const Eigen::MatrixXd& X) const {
  const auto* nb = std::get_if<NaiveBayesParams>(&params);
  if (nb == nullptr) throw ConfigError("posterior() requires a naive Bayes model");
  Eigen::MatrixXd lj = nb_log_joint(*nb, prepare(X));
  for (Eigen::Index i = 0; i < lj.rows(); ++i) {
    const double m = lj.row(i).maxCoeff();
    const double z = m + std::log((lj.row(i).array() - m).exp().sum());
    lj.row(i) = (lj.row(i).array() - z).exp();
  }
  return lj;
}

Eigen::VectorXd ClassifierModel::decision(const Eigen::MatrixXd& X) const {
  if (kind == ClassifierKind::kNaiveBayes) return posterior(X).col(1);
  const Eigen::MatrixXd Z = prepare(X);
  return std::visit(
      [&](const auto& p) -> Eigen::VectorXd {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LogisticParams>) {
          return sigmoid((Z * p.weights).array() + p.bias);
        } else if constexpr (std::is_same_v<P, MlpParams>) {
          Eigen::MatrixXd act = ((Z * p.hidden_weights.transpose()).rowwise() +
                                 p.hidden_bias.transpose())
                                    .array()
                                    .tanh();
          return sigmoid((act * p.output_weights).array() + p.output_bias);
        } else if constexpr (std::is_same_v<P, SvmParams>) {
          return (Z * p.weights).array() + p.bias;
        } else {
          return Eigen::VectorXd::Zero(Z.rows());
        }
      },
      params);
}

std::vector<int> ClassifierModel::predict(const Eigen::MatrixXd& X) const {
  const Eigen::VectorXd s = decision(X);
  const double cut = kind == ClassifierKind::kSvm ? 0.0 : 0.5;
  std::vector<int> out(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = s[i] >= cut ? 1 : 0;
  return out;
}

ClassifierModel train_classifier(ClassifierKind kind, const Eigen::MatrixXd& X,
                                 std::span<const int> y, const Hyperparams& hyper,
                                 std::uint64_t seed, std::vector<int> columns) {
  if (static_cast<Eigen::Index>(y.size()) != X.rows())
    throw TrainingError("label count does not match row count");
  std::size_t pos = 0;
  for (int v : y) pos += v != 0 ? 1 : 0;
  if (pos < 2 || y.size() - pos < 2)
    throw TrainingError("degenerate training set: need >= 2 examples per class");

  ClassifierModel model;
  model.kind = kind;
  model.columns = std::move(columns);
  Eigen::MatrixXd Z = select_columns(X, model.columns);
  if (kind != ClassifierKind::kNaiveBayes) {
    model.standardization = Standardizer::fit(Z);
    Z = model.standardization->apply(Z);
  }
  switch (kind) {
    case ClassifierKind::kNaiveBayes:
      model.params = fit_nb(Z, y, hyper);
      break;
    case ClassifierKind::kLogistic:
      model.params = fit_lr(Z, y, hyper);
      break;
    case ClassifierKind::kMlp:
      model.params = fit_mlp(Z, y, hyper, seed);
      break;
    case ClassifierKind::kSvm:
      model.params = fit_svm(Z, y, hyper, seed);
      break;
  }
  return model;
}

}  // namespace elg
