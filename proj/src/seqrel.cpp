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


#include "elg/seqrel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

std::vector<AnnotatedPair> parse_annotations(const std::string& text) {
  std::vector<AnnotatedPair> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> f = split(line, '\t');
    auto fail = [&](const std::string& what) {
      throw DataError("annotations line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() < 3 || f.size() > 4) fail("expected 3 or 4 tab-separated fields");
    AnnotatedPair p{f[0], f[1], false, std::nullopt};
    const std::string rel = to_lower(trim(f[2]));
    if (rel == "positive" || rel == "1") {
      p.positive = true;
    } else if (rel != "negative" && rel != "0") {
      fail("bad relation label '" + f[2] + "'");
    }
    const std::string dir = f.size() == 4 ? to_lower(trim(f[3])) : "-";
    if (dir == "forward" || dir == "1") {
      p.direction = Direction::kForward;
    } else if (dir == "backward" || dir == "0") {
      p.direction = Direction::kBackward;
    } else if (dir != "-" && !dir.empty()) {
      fail("bad direction label '" + f[3] + "'");
    }
    if (p.positive != p.direction.has_value())
      fail("direction must be given exactly for positive pairs");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<AnnotatedPair> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path));
}

std::string serialize_annotations(std::span<const AnnotatedPair> pairs) {
  std::ostringstream out;
  for (const AnnotatedPair& p : pairs) {
    out << p.a << '\t' << p.b << '\t' << (p.positive ? "positive" : "negative") << '\t';
    if (!p.direction) {
      out << '-';
    } else {
      out << (*p.direction == Direction::kForward ? "forward" : "backward");
    }
    out << '\n';
  }
  return out.str();
}

std::vector<LabeledPair> label_pairs(std::span<const AnnotatedPair> annotations,
                                     const PairCounts& counts, const ContextIndex& contexts,
                                     const EmbeddingTable& table,
                                     const FeatureOptions& options) {
  std::vector<LabeledPair> out;
  for (const AnnotatedPair& ann : annotations) {
    if (!counts.has_pair(ann.a, ann.b)) continue;
    LabeledPair lp{ann.a, ann.b, {}, ann.positive, ann.direction};
    if (counts.before(ann.a, ann.b) < counts.before(ann.b, ann.a)) {
      std::swap(lp.a, lp.b);
      if (lp.direction)
        lp.direction = *lp.direction == Direction::kForward ? Direction::kBackward
                                                            : Direction::kForward;
    }
    std::span<const CoOccurrenceContext> ctx;
    if (auto it = contexts.find(make_pair_key(lp.a, lp.b)); it != contexts.end())
      ctx = it->second;
    lp.features = build_feature_vector(lp.a, lp.b, counts, ctx, table, options);
    out.push_back(std::move(lp));
  }
  return out;
}

Dataset Dataset::from_pairs(std::span<const LabeledPair> pairs, Task task) {
  Dataset d;
  std::vector<const LabeledPair*> used;
  for (const LabeledPair& p : pairs)
    if (task == Task::kRelation || p.positive) used.push_back(&p);
  if (used.empty()) return d;
  d.layout = used.front()->features.layout;
  d.X.resize(static_cast<Eigen::Index>(used.size()), d.layout.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    const LabeledPair& p = *used[i];
    if (!(p.features.layout == d.layout))
      throw DataError("dataset: inconsistent feature layouts");
    d.X.row(static_cast<Eigen::Index>(i)) = p.features.values.transpose();
    if (task == Task::kRelation) {
      d.y.push_back(p.positive ? 1 : 0);
    } else {
      d.y.push_back(p.direction == Direction::kForward ? 1 : 0);
    }
    d.ids.push_back(p.a + "\t" + p.b);
  }
  return d;
}

std::vector<int> pmi_threshold_baseline(std::span<const LabeledPair> pairs,
                                        double threshold) {
  std::vector<int> out;
  out.reserve(pairs.size());
  for (const LabeledPair& p : pairs) {
    const double a2 = p.features.group(FeatureGroup::kPmi)[1];
    out.push_back(a2 >= threshold ? 1 : 0);
  }
  return out;
}

double fit_pmi_threshold(std::span<const double> scores, std::span<const int> labels) {
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  candidates.push_back(std::numeric_limits<double>::infinity());
  double best = candidates.front();
  std::size_t best_correct = 0;
  bool first = true;
  for (double c : candidates) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      correct += ((scores[i] >= c ? 1 : 0) == (labels[i] != 0 ? 1 : 0)) ? 1 : 0;
    if (first || correct > best_correct) {
      best = c;
      best_correct = correct;
      first = false;
    }
  }
  return best;
}

std::vector<Direction> preceding_assumption_baseline(std::span<const LabeledPair> pairs) {
  return std::vector<Direction>(pairs.size(), Direction::kForward);
}

std::vector<std::size_t> oversample_rows(std::span<const std::size_t> rows,
                                         std::span<const int> labels, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t r : rows) (labels[r] != 0 ? pos : neg).push_back(r);
  if (pos.empty() || neg.empty())
    throw DataError("oversample: both classes must be present");
  std::vector<std::size_t> out(rows.begin(), rows.end());
  const std::vector<std::size_t>& minority = pos.size() < neg.size() ? pos : neg;
  const std::size_t deficit = std::max(pos.size(), neg.size()) - minority.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, minority.size() - 1);
  for (std::size_t i = 0; i < deficit; ++i) out.push_back(minority[pick(rng)]);
  return out;
}

std::vector<LabeledPair> oversample(std::span<const LabeledPair> train, std::uint64_t seed) {
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<int> labels;
  for (const LabeledPair& p : train) labels.push_back(p.positive ? 1 : 0);
  std::vector<LabeledPair> out;
  for (std::size_t r : oversample_rows(rows, labels, seed)) out.push_back(train[r]);
  return out;
}

std::vector<int> ClassifierLearner::fit_predict(const Eigen::MatrixXd& X_train,
                                                std::span<const int> y_train,
                                                const Eigen::MatrixXd& X_test,
                                                std::uint64_t seed) const {
  return train_classifier(kind_, X_train, y_train, hyper_, seed, columns_).predict(X_test);
}

std::vector<int> PmiThresholdLearner::fit_predict(const Eigen::MatrixXd& X_train,
                                                  std::span<const int> y_train,
                                                  const Eigen::MatrixXd& X_test,
                                                  std::uint64_t) const {
  std::vector<double> scores(static_cast<std::size_t>(X_train.rows()));
  for (Eigen::Index i = 0; i < X_train.rows(); ++i) scores[i] = X_train(i, column_);
  const double threshold = fit_pmi_threshold(scores, y_train);
  std::vector<int> out(static_cast<std::size_t>(X_test.rows()));
  for (Eigen::Index i = 0; i < X_test.rows(); ++i)
    out[i] = X_test(i, column_) >= threshold ? 1 : 0;
  return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                       int folds, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] != 0 ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t k = 0;
  for (const auto* group : {&pos, &neg})
    for (std::size_t r : *group) out[k++ % out.size()].push_back(r);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

EvalMetrics cross_validate(const Learner& learner, const Dataset& data,
                           const CvOptions& options) {
  if (options.folds < 2) throw ConfigError("cross_validate: folds must be >= 2");
  if (data.size() < static_cast<std::size_t>(options.folds))
    throw DataError("cross_validate: dataset has " + std::to_string(data.size()) +
                    " rows, fewer than " + std::to_string(options.folds) + " folds");
  Confusion pooled;
  std::vector<double> fold_values;
  for (int r = 0; r < options.repeats; ++r) {
    const auto folds = stratified_folds(data.y, options.folds, mix_seed(options.seed, r));
    for (int f = 0; f < options.folds; ++f) {
      const std::vector<std::size_t>& test = folds[f];
      std::vector<std::size_t> train;
      for (int g = 0; g < options.folds; ++g)
        if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
      std::sort(train.begin(), train.end());
      bool both = false;
      {
        std::set<int> classes;
        for (std::size_t t : train) classes.insert(data.y[t] != 0 ? 1 : 0);
        both = classes.size() == 2;
      }
      const std::uint64_t fold_seed = mix_seed(options.seed, 1000003ULL * (r + 1) + f);
      if (options.oversample_training && both)
        train = oversample_rows(train, data.y, fold_seed);

      std::set<std::size_t> test_set(test.begin(), test.end());
      for (std::size_t t : train)
        if (test_set.count(t) > 0) throw Error("cross_validate: test row in training fold");
      if (options.audit) options.audit(FoldAudit{r, f, train, test});

      std::vector<int> y_train;
      for (std::size_t t : train) y_train.push_back(data.y[t]);
      std::vector<int> y_test;
      for (std::size_t t : test) y_test.push_back(data.y[t]);
      const std::vector<int> pred =
          learner.fit_predict(gather(data.X, train), y_train, gather(data.X, test), fold_seed);
      const Confusion c = confusion(pred, y_test);
      fold_values.push_back(metrics_from(c).accuracy);
      pooled += c;
    }
  }
  EvalMetrics m = metrics_from(pooled);
  m.fold_values = std::move(fold_values);
  m.repeats = options.repeats;
  return m;
}

LearnerFactory classifier_factory(ClassifierKind kind, const Hyperparams& hyper,
                                  const FeatureLayout& layout) {
  return [kind, hyper, layout](GroupMask mask) -> std::unique_ptr<Learner> {
    return std::make_unique<ClassifierLearner>(kind, hyper, layout.columns(mask));
  };
}

SearchResult feature_group_search(
    const std::vector<std::pair<std::string, LearnerFactory>>& learners,
    const Dataset& data, const CvOptions& options) {
  SearchResult result;
  for (const auto& [name, factory] : learners) {
    std::optional<SearchRow> best;
    for (GroupMask mask = 1; mask <= kAllGroups; ++mask) {
      std::unique_ptr<Learner> learner = factory(mask);
      SearchRow row{name, mask, cross_validate(*learner, data, options)};
      const bool better =
          !best || row.metrics.accuracy > best->metrics.accuracy ||
          (row.metrics.accuracy == best->metrics.accuracy && row.metrics.f1 > best->metrics.f1);
      if (better) best = row;
      result.rows.push_back(std::move(row));
    }
    result.best.push_back(*best);
  }
  return result;
}

std::string format_report(std::span<const ReportRow> rows) {
  std::size_t fw = 8, cw = 10;
  for (const ReportRow& r : rows) {
    fw = std::max(fw, r.features.size());
    cw = std::max(cw, r.classifier.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(fw)) << "Features" << "  "
      << std::setw(static_cast<int>(cw)) << "Classifier" << "  " << std::right
      << std::setw(8) << "Accuracy" << std::setw(11) << "Precision" << std::setw(8)
      << "Recall" << std::setw(8) << "F1" << '\n';
  out << std::fixed << std::setprecision(1);
  for (const ReportRow& r : rows) {
    out << std::left << std::setw(static_cast<int>(fw)) << r.features << "  "
        << std::setw(static_cast<int>(cw)) << r.classifier << "  " << std::right
        << std::setw(8) << r.metrics.accuracy << std::setw(11) << r.metrics.precision
        << std::setw(8) << r.metrics.recall << std::setw(8) << r.metrics.f1 << '\n';
  }
  return out.str();
}

std::string report_tsv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "features\tclassifier\taccuracy\tprecision\trecall\tf1\n";
  for (const ReportRow& r : rows) {
    out << r.features << '\t' << r.classifier << '\t' << format_double(r.metrics.accuracy)
        << '\t' << format_double(r.metrics.precision) << '\t'
        << format_double(r.metrics.recall) << '\t' << format_double(r.metrics.f1) << '\n';
  }
  return out.str();
}

}  // namespace elg
