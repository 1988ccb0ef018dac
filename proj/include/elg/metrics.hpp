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


#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elg {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(int predicted, int actual);
  Confusion& operator+=(const Confusion& o);
};

Confusion confusion(std::span<const int> predicted, std::span<const int> actual);

// Percentages in [0, 100]. f1 is the harmonic mean of precision and recall
// (0 when both are 0).
struct EvalMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<double> fold_values;  // per-fold accuracy
  int repeats = 1;
};

EvalMetrics metrics_from(const Confusion& c);
double f1_score(double precision, double recall);

}  // namespace elg
