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


#include "elg/metrics.hpp"

#include <cassert>

namespace elg {

void Confusion::add(int predicted, int actual) {
  if (predicted != 0) {
    actual != 0 ? ++tp : ++fp;
  } else {
    actual != 0 ? ++fn : ++tn;
  }
}

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Confusion confusion(std::span<const int> predicted, std::span<const int> actual) {
  assert(predicted.size() == actual.size());
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) c.add(predicted[i], actual[i]);
  return c;
}

double f1_score(double precision, double recall) {
  return precision + recall == 0.0 ? 0.0
                                   : 2.0 * precision * recall / (precision + recall);
}

EvalMetrics metrics_from(const Confusion& c) {
  EvalMetrics m;
  auto pct = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = pct(c.tp + c.tn, c.total());
  m.precision = pct(c.tp, c.tp + c.fp);
  m.recall = pct(c.tp, c.tp + c.fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

}  // namespace elg
