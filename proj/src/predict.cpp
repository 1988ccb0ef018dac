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


#include "elg/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

namespace {

// Portable draws: std distributions differ between standard libraries.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<EventChain> chains_from_documents(std::span<const DocumentEvents> docs,
                                              std::size_t max_length) {
  std::vector<EventChain> out;
  for (const auto& doc : docs) {
    const std::size_t n = doc.events.size();
    const std::size_t step = max_length == 0 ? std::max<std::size_t>(n, 1) : max_length;
    for (std::size_t start = 0, w = 0; start < n; start += step, ++w) {
      const std::size_t end = std::min(n, start + step);
      if (end - start < 2) continue;
      EventChain c;
      c.id = max_length == 0 ? doc.doc_id : doc.doc_id + "#" + std::to_string(w);
      for (std::size_t i = start; i < end; ++i) c.events.push_back(doc.events[i].event);
      out.push_back(std::move(c));
    }
  }
  return out;
}

DistractorPolicy parse_distractor_policy(const std::string& name) {
  if (name == "frequency") return DistractorPolicy::kFrequency;
  if (name == "uniform") return DistractorPolicy::kUniform;
  throw ConfigError("unknown distractor policy '" + name + "'");
}

std::vector<McncInstance> generate_mcnc(std::span<const EventChain> chains,
                                        const std::map<std::string, long long>& vocabulary,
                                        const McncOptions& options) {
  if (options.n_candidates < 1) throw ConfigError("n_candidates must be >= 1");
  if (vocabulary.size() < options.n_candidates)
    throw DataError("vocabulary of " + std::to_string(vocabulary.size()) +
                    " events is smaller than " + std::to_string(options.n_candidates) +
                    " candidates");
  std::vector<std::string> keys;
  std::vector<double> weights;
  for (const auto& [k, f] : vocabulary) {
    keys.push_back(k);
    weights.push_back(options.policy == DistractorPolicy::kFrequency
                          ? static_cast<double>(std::max<long long>(f, 0))
                          : 1.0);
  }

  std::vector<McncInstance> out;
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    const auto& chain = chains[ci];
    if (chain.events.size() < 2)
      throw DataError("chain '" + chain.id + "' has fewer than 2 events");
    for (const auto& e : chain.events)
      if (!vocabulary.count(e))
        throw DataError("chain '" + chain.id + "' references unknown event '" + e + "'");
    McncInstance inst;
    inst.chain_id = chain.id;
    inst.context.assign(chain.events.begin(), chain.events.end() - 1);
    const std::string& answer = chain.events.back();

    std::set<std::string> excluded(inst.context.begin(), inst.context.end());
    excluded.insert(answer);
    std::vector<double> w = weights;
    double total = 0.0;
    std::size_t available = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (excluded.count(keys[i])) w[i] = 0.0;
      if (w[i] > 0.0) ++available;
      total += w[i];
    }
    const std::size_t need = options.n_candidates - 1;
    if (available < need)
      throw DataError("chain '" + chain.id + "': only " + std::to_string(available) +
                      " distractors available, need " + std::to_string(need));

    std::mt19937_64 rng(mix_seed(options.seed, ci));
    std::vector<std::string> cands{answer};
    for (std::size_t d = 0; d < need; ++d) {
      double r = unit(rng) * total;
      std::size_t pick = keys.size();
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (w[i] <= 0.0) continue;
        pick = i;
        if (r < w[i]) break;
        r -= w[i];
      }
      cands.push_back(keys[pick]);
      total -= w[pick];
      w[pick] = 0.0;
    }
    // Fisher-Yates; the answer's position follows the permutation.
    std::vector<std::size_t> perm(cands.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      inst.candidates.push_back(cands[perm[i]]);
      if (perm[i] == 0) inst.answer_index = i;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::string serialize_mcnc(std::span<const McncInstance> instances) {
  std::string out;
  for (const auto& inst : instances) {
    out += join(inst.context, " ") + "\t" + join(inst.candidates, " ") + "\t" +
           std::to_string(inst.answer_index) + "\n";
  }
  return out;
}

std::vector<McncInstance> parse_mcnc(const std::string& text) {
  std::vector<McncInstance> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto words = [](const std::string& s) {
    std::vector<std::string> w;
    for (auto& p : split(s, ' '))
      if (!p.empty()) w.push_back(p);
    return w;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto f = split(line, '\t');
    long long ans;
    if (f.size() != 3 || !parse_int(f[2], ans))
      throw DataError("mcnc line " + std::to_string(lineno) + ": expected 3 fields");
    McncInstance inst;
    inst.chain_id = std::to_string(out.size());
    inst.context = words(f[0]);
    inst.candidates = words(f[1]);
    if (inst.context.empty() || inst.candidates.empty() || ans < 0 ||
        ans >= static_cast<long long>(inst.candidates.size()))
      throw DataError("mcnc line " + std::to_string(lineno) + ": bad instance");
    inst.answer_index = static_cast<std::size_t>(ans);
    out.push_back(std::move(inst));
  }
  return out;
}

std::size_t argmax_choice(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

std::vector<double> RandomScorer::score(const McncInstance& inst, std::size_t index) const {
  std::mt19937_64 rng(mix_seed(seed_, index));
  std::vector<double> s(inst.candidates.size(), 0.0);
  if (!s.empty()) s[uniform_index(rng, s.size())] = 1.0;
  return s;
}

std::vector<double> PmiScorer::score(const McncInstance& inst, std::size_t) const {
  std::vector<double> s(inst.candidates.size(), 0.0);
  const double n = static_cast<double>(counts_->n_events());
  if (n <= 0) return s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& cand = inst.candidates[i];
    const double cc = static_cast<double>(counts_->event_count(cand));
    for (const auto& c : inst.context)
      s[i] += pmi(static_cast<double>(counts_->event_count(c)), cc,
                  static_cast<double>(counts_->together(c, cand)), n, eps_);
  }
  return s;
}

std::vector<double> BigramScorer::score(const McncInstance& inst, std::size_t) const {
  std::vector<double> s(inst.candidates.size(), 0.0);
  const double v = std::max<double>(1.0, static_cast<double>(counts_->events().size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (const auto& c : inst.context)
      s[i] += std::log((static_cast<double>(counts_->before(c, inst.candidates[i])) + 1.0) /
                       (static_cast<double>(counts_->event_count(c)) + v));
  return s;
}

std::vector<double> EmbeddingScorer::score(const McncInstance& inst, std::size_t) const {
  Eigen::VectorXd ctx = Eigen::VectorXd::Zero(table_->dim());
  for (const auto& c : inst.context) ctx += embed_event(c, *table_).vec;
  std::vector<double> s;
  for (const auto& cand : inst.candidates) s.push_back(cosine(embed_event(cand, *table_).vec, ctx));
  return s;
}

GraphScorer::GraphScorer(const ElgGraph& graph, GraphScorerOptions options,
                         const EmbeddingTable* table)
    : graph_(&graph), options_(options), table_(table), index_(graph),
      component_(graph.nodes.size(), -1), has_edges_(graph.nodes.size(), 0) {
  const auto comps = strongly_connected_components(graph);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) component_[v] = static_cast<int>(c);
  for (const auto& e : graph.edges) has_edges_[e.src] = has_edges_[e.dst] = 1;
  if (table_)
    for (const auto& node : graph.nodes) node_vectors_.push_back(embed_event(node.canonical, *table_));
}

std::optional<int> GraphScorer::resolve(const std::string& key) const {
  std::optional<int> node = index_.find_key(key);
  if (!node && table_) {
    const EventVector v = embed_event(key, *table_);
    double best = options_.resolve_threshold;
    if (!v.oov)
      for (std::size_t i = 0; i < node_vectors_.size(); ++i) {
        if (node_vectors_[i].oov) continue;
        const double c = cosine(v.vec, node_vectors_[i].vec);
        if (c >= best && (!node || c > best)) {
          best = c;
          node = static_cast<int>(i);
        }
      }
  }
  if (!node || has_edges_[*node]) return node;
  // Isolated node: follow its strongest similarity link.
  const SimilarityLink* best = nullptr;
  for (std::size_t li : index_.node_links(*node)) {
    const auto& l = graph_->links[li];
    const int other = l.a == *node ? l.b : l.a;
    const int best_other = best ? (best->a == *node ? best->b : best->a) : 0;
    if (!best || l.score > best->score || (l.score == best->score && other < best_other))
      best = &l;
  }
  if (best) return best->a == *node ? best->b : best->a;
  return node;
}

std::vector<double> GraphScorer::score(const McncInstance& inst, std::size_t) const {
  std::vector<int> ctx;
  for (const auto& c : inst.context)
    if (auto n = resolve(c)) ctx.push_back(*n);
  std::vector<double> s(inst.candidates.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto cand = resolve(inst.candidates[i]);
    if (!cand) continue;
    bool shares = false;
    for (int c : ctx) {
      if (c == *cand) continue;
      if (const TypedEdge* e = index_.find_edge(c, *cand, Relation::kSequential))
        s[i] += e->probability.value_or(0.0);
      if (component_[c] == component_[*cand]) shares = true;
    }
    if (shares) s[i] += options_.beta;
  }
  return s;
}

McncEvaluation evaluate_mcnc(const Scorer& scorer, std::span<const McncInstance> instances) {
  if (instances.empty()) throw DataError("no MCNC instances to evaluate");
  McncEvaluation ev;
  ev.method = scorer.name();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto s = scorer.score(instances[i], i);
    const std::size_t pick = argmax_choice(s);
    const int ok = pick == instances[i].answer_index ? 1 : 0;
    hits += static_cast<std::size_t>(ok);
    ev.chosen.push_back(pick);
    ev.correct.push_back(ok);
    ev.scores.push_back(std::move(s));
  }
  ev.accuracy = 100.0 * static_cast<double>(hits) / static_cast<double>(instances.size());
  return ev;
}

double paired_t_test(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DataError("paired t-test needs equal-length samples");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  if (ss == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  const double t = mean / se;
  boost::math::students_t dist(static_cast<double>(n - 1));
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

std::string format_mcnc_report(std::span<const McncEvaluation> results) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].accuracy > results[best].accuracy) best = i;
  std::size_t width = 7;
  for (const auto& r : results) width = std::max(width, r.method.size());
  std::ostringstream out;
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size() + 2, ' '); };
  out << pad("Methods") << "Accuracy (%)  p-value\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.2f", results[i].accuracy);
    std::string p = "-";
    if (i != best) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", paired_t_test(results[i].correct, results[best].correct));
      p = buf;
    }
    std::string a = acc;
    out << pad(results[i].method) << a << std::string(14 - std::min<std::size_t>(13, a.size()), ' ')
        << p << "\n";
  }
  return out.str();
}

}  // namespace elg
