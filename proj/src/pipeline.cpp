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


#include "elg/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <json.hpp>

#include "elg/error.hpp"
#include "elg/util.hpp"

extern char** environ;

namespace elg {

namespace pt = boost::property_tree;

// ---- Config -----------------------------------------------------------------

Config Config::parse(const std::string& text, std::filesystem::path base_dir) {
  Config c;
  c.base_ = std::move(base_dir);
  std::istringstream in(text);
  try {
    pt::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::filesystem::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse(read_file(path), base);
}

Config::Env Config::process_env() {
  Env env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return env;
}

void Config::apply_env(const Env& env) {
  for (const auto& [name, value] : env) {
    if (!starts_with(name, "ELG_")) continue;
    const std::string rest = name.substr(4);
    const auto us = rest.find('_');
    if (us == std::string::npos || us == 0 || us + 1 == rest.size()) continue;
    set(to_lower(rest.substr(0, us)), to_lower(rest.substr(us + 1)), value);
  }
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  tree_.put(pt::ptree::path_type(section + "." + key, '.'), value);
}

bool Config::has(const std::string& section, const std::string& key) const {
  return tree_.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'))
      .has_value();
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  auto v = tree_.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'));
  return v ? std::string(trim(*v)) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  if (!has(section, key)) return fallback;
  long long v;
  if (!parse_int(get(section, key), v))
    throw ConfigError("config " + section + "." + key + ": expected an integer");
  return v;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  if (!has(section, key)) return fallback;
  double v;
  if (!parse_double(get(section, key), v))
    throw ConfigError("config " + section + "." + key + ": expected a number");
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = to_lower(get(section, key));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config " + section + "." + key + ": expected a boolean");
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<std::string> out;
  for (const auto& part : split(get(section, key), ',')) {
    auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::filesystem::path Config::get_path(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  if (v.empty()) return {};
  std::filesystem::path p(v);
  return p.is_absolute() ? p : base_ / p;
}

std::string Config::section_text(const std::string& section) const {
  std::string out;
  auto child = tree_.get_child_optional(pt::ptree::path_type(section, '.'));
  if (!child) return out;
  std::map<std::string, std::string> sorted;
  for (const auto& [k, v] : *child) sorted[k] = std::string(trim(v.data()));
  for (const auto& [k, v] : sorted) out += section + "." + k + "=" + v + "\n";
  return out;
}

// ---- option builders ----------------------------------------------------------

namespace {

int checked_int(const Config& c, const char* s, const char* k, long long fallback, long long lo) {
  const long long v = c.get_int(s, k, fallback);
  if (v < lo)
    throw ConfigError(std::string("config ") + s + "." + k + " must be >= " + std::to_string(lo));
  return static_cast<int>(v);
}

}  // namespace

CleanOptions clean_options(const Config& c) {
  CleanOptions o;
  o.min_tokens = static_cast<std::size_t>(checked_int(c, "ingest", "min_tokens", 2, 1));
  o.max_tokens = static_cast<std::size_t>(checked_int(c, "ingest", "max_tokens", 200, 1));
  if (o.max_tokens < o.min_tokens) throw ConfigError("ingest.max_tokens < ingest.min_tokens");
  return o;
}

SkipGramOptions skipgram_options(const Config& c) {
  SkipGramOptions o;
  o.dim = checked_int(c, "embed", "dim", o.dim, 1);
  o.window = checked_int(c, "embed", "window", o.window, 1);
  o.epochs = checked_int(c, "embed", "epochs", o.epochs, 1);
  o.negative_samples = checked_int(c, "embed", "negative", o.negative_samples, 0);
  o.min_count = checked_int(c, "embed", "min_count", o.min_count, 1);
  o.learning_rate = c.get_double("embed", "learning_rate", o.learning_rate);
  o.seed = static_cast<std::uint64_t>(c.get_int("embed", "seed", 1));
  return o;
}

CountOptions count_options(const Config& c) {
  CountOptions o;
  o.window_sentences = checked_int(c, "count", "window", o.window_sentences, 0);
  return o;
}

Hyperparams hyperparams(const Config& c) {
  Hyperparams h;
  h.nb_variance_floor = c.get_double("classify", "nb_variance_floor", h.nb_variance_floor);
  h.lr_learning_rate = c.get_double("classify", "lr_learning_rate", h.lr_learning_rate);
  h.lr_l2 = c.get_double("classify", "lr_l2", h.lr_l2);
  h.lr_max_epochs = checked_int(c, "classify", "lr_max_epochs", h.lr_max_epochs, 1);
  h.lr_tolerance = c.get_double("classify", "lr_tolerance", h.lr_tolerance);
  h.mlp_hidden = checked_int(c, "classify", "mlp_hidden", h.mlp_hidden, 1);
  h.mlp_learning_rate = c.get_double("classify", "mlp_learning_rate", h.mlp_learning_rate);
  h.mlp_epochs = checked_int(c, "classify", "mlp_epochs", h.mlp_epochs, 1);
  h.svm_lambda = c.get_double("classify", "svm_lambda", h.svm_lambda);
  h.svm_epochs = checked_int(c, "classify", "svm_epochs", h.svm_epochs, 1);
  return h;
}

MergeOptions merge_options(const Config& c) {
  MergeOptions o;
  o.tau_merge = c.get_double("merge", "tau_merge", o.tau_merge);
  o.tau_link = c.get_double("merge", "tau_link", o.tau_link);
  o.max_missing_fraction = c.get_double("merge", "max_missing_fraction", o.max_missing_fraction);
  o.evidence_cap = static_cast<std::size_t>(checked_int(c, "merge", "evidence_cap", 10, 1));
  if (!(o.tau_link > 0.0 && o.tau_link <= o.tau_merge && o.tau_merge <= 1.0))
    throw ConfigError("merge thresholds must satisfy 0 < tau_link <= tau_merge <= 1");
  return o;
}

McncOptions mcnc_options(const Config& c) {
  McncOptions o;
  o.n_candidates = static_cast<std::size_t>(checked_int(c, "mcnc", "n_candidates", 5, 1));
  o.seed = static_cast<std::uint64_t>(c.get_int("mcnc", "seed", 1));
  o.policy = parse_distractor_policy(c.get("mcnc", "policy", "frequency"));
  return o;
}

ServiceConfig service_config(const Config& c) {
  ServiceConfig s;
  s.host = c.get("service", "host", s.host);
  s.port = checked_int(c, "service", "port", s.port, 0);
  s.node_cap = static_cast<std::size_t>(checked_int(c, "service", "node_cap", 200, 1));
  s.max_depth = checked_int(c, "service", "max_depth", s.max_depth, 1);
  s.default_limit = static_cast<std::size_t>(checked_int(c, "service", "default_limit", 10, 1));
  s.cors_allowlist = c.get_list("service", "cors");
  s.graph_path = c.get_path("service", "graph");
  s.corpus_path = c.get_path("service", "corpus");
  s.validate();
  return s;
}

GroupMask parse_group_mask(const std::string& text) {
  const std::string t = to_lower(trim(text));
  if (t == "all") return kAllGroups;
  long long v;
  if (parse_int(t, v)) {
    if (v < 1 || v > 15) throw ConfigError("feature mask must be in 1..15");
    return static_cast<GroupMask>(v);
  }
  static const std::map<std::string, FeatureGroup> kNames = {
      {"frequency", FeatureGroup::kFrequency},
      {"ratio", FeatureGroup::kRatio},
      {"context", FeatureGroup::kContext},
      {"pmi", FeatureGroup::kPmi}};
  GroupMask m = 0;
  for (const auto& part : split(t, '+')) {
    auto it = kNames.find(std::string(trim(part)));
    if (it == kNames.end()) throw ConfigError("unknown feature group '" + part + "'");
    m |= group_bit(it->second);
  }
  return m;
}

SeqrelSettings seqrel_settings(const Config& c) {
  SeqrelSettings s;
  s.kind = parse_classifier_kind(c.get("classify", "classifier", "lr"));
  s.mask = parse_group_mask(c.get("classify", "features", "all"));
  s.hyper = hyperparams(c);
  s.cv.folds = checked_int(c, "classify", "folds", 5, 2);
  s.cv.repeats = checked_int(c, "classify", "repeats", 10, 1);
  s.cv.seed = static_cast<std::uint64_t>(c.get_int("classify", "seed", 1));
  s.min_pair_count = c.get_int("classify", "min_pair_count", 1);
  s.evaluate = c.get_bool("classify", "evaluate", true);
  return s;
}

// ---- sequential classification ----------------------------------------------

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

ClassifierModel fit_final(const Dataset& data, const SeqrelSettings& s) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto rows = oversample_rows(all, data.y, s.cv.seed);
  std::vector<int> y;
  for (std::size_t r : rows) y.push_back(data.y[r]);
  return train_classifier(s.kind, gather_rows(data.X, rows), y, s.hyper, s.cv.seed,
                          data.layout.columns(s.mask));
}

}  // namespace

std::vector<ReportRow> seqrel_cv_rows(std::span<const LabeledPair> labeled, Task task,
                                      const SeqrelSettings& settings) {
  const Dataset data = Dataset::from_pairs(labeled, task);
  std::vector<ReportRow> rows;
  ClassifierLearner learner(settings.kind, settings.hyper, data.layout.columns(settings.mask));
  rows.push_back({mask_name(settings.mask), learner.name(), cross_validate(learner, data, settings.cv)});
  if (task == Task::kRelation) {
    const int column = data.layout.range(FeatureGroup::kPmi).first + 1;
    PmiThresholdLearner pmi(column);
    rows.push_back({"pmi", "PMI threshold", cross_validate(pmi, data, settings.cv)});
  } else {
    ConstantLearner forward(1);
    CvOptions cv = settings.cv;
    cv.oversample_training = false;
    rows.push_back({"order", "Preceding Assumption", cross_validate(forward, data, cv)});
  }
  return rows;
}

SeqrelOutcome classify_sequential(const PairCounts& counts, const ContextIndex& contexts,
                                  const EmbeddingTable& table,
                                  const std::vector<AnnotatedPair>* annotations,
                                  const SeqrelSettings& settings) {
  SeqrelOutcome out;
  struct Candidate {
    std::string a, b;  // oriented: count(a before b) >= count(b before a)
  };
  std::vector<Candidate> cands;
  for (const auto& [key, tt] : counts.pairs()) {
    if (tt.first + tt.second < settings.min_pair_count) continue;
    if (tt.first >= tt.second)
      cands.push_back({key.first, key.second});
    else
      cands.push_back({key.second, key.first});
  }
  out.candidates = cands.size();

  if (!annotations) {
    for (const auto& c : cands) out.pairs.push_back({c.a, c.b});
    return out;
  }
  out.supervised = true;
  const auto labeled = label_pairs(*annotations, counts, contexts, table);
  if (settings.evaluate) {
    out.relation_rows = seqrel_cv_rows(labeled, Task::kRelation, settings);
    out.direction_rows = seqrel_cv_rows(labeled, Task::kDirection, settings);
  }
  const Dataset rel = Dataset::from_pairs(labeled, Task::kRelation);
  const Dataset dir = Dataset::from_pairs(labeled, Task::kDirection);
  const ClassifierModel rel_model = fit_final(rel, settings);
  const ClassifierModel dir_model = fit_final(dir, settings);
  if (cands.empty()) return out;

  const FeatureLayout layout = FeatureOptions{}.layout(table.dim());
  Eigen::MatrixXd X(static_cast<Eigen::Index>(cands.size()), layout.size());
  static const std::vector<CoOccurrenceContext> kNone;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    auto it = contexts.find(make_pair_key(cands[i].a, cands[i].b));
    const auto& ctx = it == contexts.end() ? kNone : it->second;
    X.row(static_cast<Eigen::Index>(i)) =
        build_feature_vector(cands[i].a, cands[i].b, counts, ctx, table).values.transpose();
  }
  const auto is_rel = rel_model.predict(X);
  const auto forward = dir_model.predict(X);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!is_rel[i]) continue;
    if (forward[i])
      out.pairs.push_back({cands[i].a, cands[i].b});
    else
      out.pairs.push_back({cands[i].b, cands[i].a});
  }
  return out;
}

std::string serialize_directed_pairs(std::span<const DirectedPair> pairs) {
  std::string out;
  for (const auto& p : pairs) out += p.from + "\t" + p.to + "\n";
  return out;
}

std::vector<DirectedPair> parse_directed_pairs(const std::string& text) {
  std::vector<DirectedPair> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      throw DataError("pairs line " + std::to_string(lineno) + ": expected 'from<TAB>to'");
    out.push_back({f[0], f[1]});
  }
  return out;
}

std::vector<CausalMention> extract_causal_mentions(const ParsedCorpus& corpus,
                                                   std::span<const CausalRule> rules) {
  std::vector<CausalMention> out;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences) {
      auto found = apply_rules(s, rules);
      out.insert(out.end(), found.begin(), found.end());
    }
  return out;
}

std::unique_ptr<Scorer> make_scorer(const std::string& name, std::uint64_t seed,
                                    const PairCounts* counts, const EmbeddingTable* table,
                                    const ElgGraph* graph) {
  auto need = [&](const void* p, const char* what) {
    if (!p) throw ConfigError("scorer '" + name + "' needs " + what);
  };
  if (name == "random") return std::make_unique<RandomScorer>(seed);
  if (name == "pmi") {
    need(counts, "pair counts");
    return std::make_unique<PmiScorer>(*counts);
  }
  if (name == "bigram") {
    need(counts, "pair counts");
    return std::make_unique<BigramScorer>(*counts);
  }
  if (name == "embedding") {
    need(table, "word vectors");
    return std::make_unique<EmbeddingScorer>(*table);
  }
  if (name == "graph") {
    need(graph, "a graph");
    return std::make_unique<GraphScorer>(*graph, GraphScorerOptions{}, table);
  }
  throw ConfigError("unknown scorer '" + name + "'");
}

// ---- pipeline -------------------------------------------------------------------

Artifacts::Artifacts(std::filesystem::path d) : dir(std::move(d)) {
  corpus = dir / "corpus.conllu";
  events = dir / "events.tsv";
  counts = dir / "counts.tsv";
  vectors = dir / "vectors.txt";
  pairs = dir / "sequential_pairs.tsv";
  seqrel_report = dir / "seqrel_report.tsv";
  seqrel_table = dir / "seqrel_report.txt";
  causal = dir / "causal_mentions.tsv";
  causal_eval = dir / "causal_eval.tsv";
  graph_raw = dir / "graph_raw.elg";
  graph = dir / "graph.elg";
  merge_report = dir / "merge_report.txt";
  mcnc = dir / "mcnc_instances.tsv";
  mcnc_report = dir / "mcnc_report.tsv";
  mcnc_table = dir / "mcnc_report.txt";
  manifest = dir / "manifest.json";
}

void stamp_graph_meta(ElgGraph& graph, const Config& config, const std::filesystem::path& corpus) {
  if (!corpus.empty()) graph.meta["corpus_hash"] = hex64(fnv1a(read_file(corpus)));
  graph.meta["window"] = std::to_string(count_options(config).window_sentences);
}

void require_artifact(const std::filesystem::path& path, const std::string& stage) {
  if (!std::filesystem::exists(path))
    throw DataError("missing artifact " + path.string() + "; run the '" + stage +
                    "' stage first");
}

namespace {

struct StageDef {
  std::string name;
  std::vector<std::string> sections;  // "section" or a single "section.key"
  // (path, producing stage) for upstream artifacts; producer empty = external input.
  std::vector<std::pair<std::filesystem::path, std::string>> inputs;
  std::vector<std::filesystem::path> outputs;
  std::function<std::string()> run;
};

std::string file_hash(const std::filesystem::path& p) { return hex64(fnv1a(read_file(p))); }

CorpusFormat input_format(const Config& c, const std::filesystem::path& path) {
  const std::string f = c.get("paths", "format");
  if (!f.empty()) return parse_corpus_format(f);
  return path.extension() == ".jsonl" ? CorpusFormat::kJsonl : CorpusFormat::kConllu;
}

ParsedCorpus load_artifact_corpus(const std::filesystem::path& p) {
  return load_corpus(p, CorpusFormat::kConllu);
}

std::vector<DocumentEvents> load_events(const std::filesystem::path& p) {
  return parse_events(read_file(p));
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<StageReport> run_pipeline(const Config& config, std::vector<std::string> stages,
                                      std::ostream* log) {
  if (stages.empty()) stages = config.get_list("pipeline", "stages", kPipelineStages);
  std::set<std::string> wanted;
  for (const auto& s : stages) {
    if (s != "serve" &&
        std::find(kPipelineStages.begin(), kPipelineStages.end(), s) == kPipelineStages.end())
      throw ConfigError("unknown stage '" + s + "'");
    wanted.insert(s);
  }
  const std::filesystem::path out_dir = config.get_path("paths", "output").empty()
                                            ? std::filesystem::path("out")
                                            : config.get_path("paths", "output");
  const Artifacts art(out_dir);
  std::filesystem::create_directories(art.dir);

  const std::filesystem::path corpus_in = config.get_path("paths", "corpus");
  const std::filesystem::path annotations = config.get_path("paths", "annotations");
  const std::filesystem::path rules_path = config.get_path("paths", "rules");
  const std::filesystem::path blacklist = config.get_path("paths", "blacklist");
  const std::filesystem::path curated = config.get_path("paths", "curated");
  const std::filesystem::path causal_gold = config.get_path("paths", "causal_gold");

  auto external = [](const std::filesystem::path& p) {
    return std::pair<std::filesystem::path, std::string>(p, "");
  };

  std::vector<StageDef> defs;
  // Only the format matters from [paths]; the output dir must not change keys.
  defs.push_back({"ingest", {"ingest", "paths.format"}, {external(corpus_in)}, {art.corpus}, [&] {
    if (corpus_in.empty()) throw ConfigError("paths.corpus is not set");
    LoadReport rep;
    ParsedCorpus raw = load_corpus(corpus_in, input_format(config, corpus_in), &rep);
    ParsedCorpus clean = clean_corpus(raw, clean_options(config));
    if (clean.documents.empty()) throw EmptyCorpusError("no documents survive cleaning");
    save_corpus(clean, art.corpus, CorpusFormat::kConllu);
    return std::to_string(clean.documents.size()) + " documents, " +
           std::to_string(clean.sentence_count()) + " sentences (" +
           std::to_string(rep.sentences_dropped) + " malformed dropped)";
  }});

  std::vector<std::pair<std::filesystem::path, std::string>> extract_in{{art.corpus, "ingest"}};
  if (!blacklist.empty()) extract_in.push_back(external(blacklist));
  defs.push_back({"extract", {"extract"}, extract_in, {art.events}, [&] {
    const ParsedCorpus corpus = load_artifact_corpus(art.corpus);
    const auto raw = extract_corpus_events(corpus);
    const GeneralityBlacklist bl =
        blacklist.empty() ? GeneralityBlacklist{} : GeneralityBlacklist::load(blacklist);
    const auto docs = filter_corpus_events(
        raw, static_cast<std::size_t>(config.get_int("extract", "min_frequency", 2)), bl);
    write_file(art.events, serialize_events(docs));
    std::size_t n = 0;
    for (const auto& d : docs) n += d.events.size();
    return std::to_string(n) + " event occurrences";
  }});

  defs.push_back({"count",
                  {"count"},
                  {{art.corpus, "ingest"}, {art.events, "extract"}},
                  {art.counts},
                  [&] {
                    const ParsedCorpus corpus = load_artifact_corpus(art.corpus);
                    const auto docs = load_events(art.events);
                    const PairCounts counts = count_pairs(docs, count_options(config), &corpus);
                    write_file(art.counts, counts.serialize());
                    return std::to_string(counts.events().size()) + " events, " +
                           std::to_string(counts.pairs().size()) + " pairs";
                  }});

  defs.push_back({"embed", {"embed"}, {{art.corpus, "ingest"}}, {art.vectors}, [&] {
    const ParsedCorpus corpus = load_artifact_corpus(art.corpus);
    const EmbeddingTable table = train_skipgram(corpus, skipgram_options(config));
    save_vectors(table, art.vectors);
    return std::to_string(table.size()) + " words x " + std::to_string(table.dim());
  }});

  std::vector<std::pair<std::filesystem::path, std::string>> classify_in{
      {art.corpus, "ingest"}, {art.events, "extract"}, {art.counts, "count"},
      {art.vectors, "embed"}};
  if (!annotations.empty()) classify_in.push_back(external(annotations));
  defs.push_back({"classify",
                  {"classify", "count"},
                  classify_in,
                  {art.pairs, art.seqrel_report, art.seqrel_table},
                  [&] {
    const ParsedCorpus corpus = load_artifact_corpus(art.corpus);
    const auto docs = load_events(art.events);
    ContextIndex contexts;
    const PairCounts counts = count_pairs(docs, count_options(config), &corpus, &contexts);
    if (!(counts == PairCounts::parse(read_file(art.counts))))
      throw CorruptionError("counts artifact is stale; rerun the 'count' stage");
    const EmbeddingTable table = load_vectors(art.vectors);
    std::optional<std::vector<AnnotatedPair>> ann;
    if (!annotations.empty()) ann = load_annotations(annotations);
    const auto outcome = classify_sequential(counts, contexts, table, ann ? &*ann : nullptr,
                                             seqrel_settings(config));
    write_file(art.pairs, serialize_directed_pairs(outcome.pairs));
    std::vector<ReportRow> all = outcome.relation_rows;
    all.insert(all.end(), outcome.direction_rows.begin(), outcome.direction_rows.end());
    write_file(art.seqrel_report, report_tsv(all));
    std::string table_text;
    if (outcome.supervised && !all.empty()) {
      table_text = "Sequential relation\n" + format_report(outcome.relation_rows) +
                   "\nDirection\n" + format_report(outcome.direction_rows);
    } else {
      table_text = "no annotations: every candidate pair kept, direction by text order\n";
    }
    write_file(art.seqrel_table, table_text);
    return std::to_string(outcome.pairs.size()) + " of " + std::to_string(outcome.candidates) +
           " candidate pairs sequential" + (outcome.supervised ? "" : " (unsupervised)");
  }});

  std::vector<std::pair<std::filesystem::path, std::string>> causal_in{{art.corpus, "ingest"},
                                                                        external(rules_path)};
  if (!causal_gold.empty()) causal_in.push_back(external(causal_gold));
  defs.push_back({"causality", {"causality"}, causal_in, {art.causal, art.causal_eval}, [&] {
    if (rules_path.empty()) throw ConfigError("paths.rules is not set");
    const ParsedCorpus corpus = load_artifact_corpus(art.corpus);
    const auto rules = load_rules(rules_path);
    const auto mentions = extract_causal_mentions(corpus, rules);
    write_file(art.causal, serialize_mentions(mentions));
    std::string eval = "precision\trecall\tf1\ttoken_accuracy\n";
    if (!causal_gold.empty()) {
      const GoldCorpus gold = load_gold(causal_gold);
      std::vector<CausalMention> pred;
      std::vector<ParsedSentence> sentences;
      for (const auto& d : gold.corpus.documents)
        for (const auto& s : d.sentences) {
          auto m = apply_rules(s, rules);
          pred.insert(pred.end(), m.begin(), m.end());
          sentences.push_back(s);
        }
      const EvalMetrics m = evaluate_extraction(pred, gold.mentions, sentences);
      eval += format_double(m.precision) + "\t" + format_double(m.recall) + "\t" +
              format_double(m.f1) + "\t" + format_double(m.accuracy) + "\n";
    }
    write_file(art.causal_eval, eval);
    return std::to_string(mentions.size()) + " causal mentions";
  }});

  std::vector<std::pair<std::filesystem::path, std::string>> build_in{
      {art.corpus, "ingest"}, {art.events, "extract"}, {art.counts, "count"},
      {art.pairs, "classify"}, {art.causal, "causality"}};
  if (!curated.empty()) build_in.push_back(external(curated));
  defs.push_back({"build", {"build", "count"}, build_in, {art.graph_raw}, [&] {
    const ParsedCorpus corpus = load_artifact_corpus(art.corpus);
    const auto docs = load_events(art.events);
    ContextIndex contexts;
    const PairCounts counts = count_pairs(docs, count_options(config), &corpus, &contexts);
    GraphInputs in;
    in.sequential = parse_directed_pairs(read_file(art.pairs));
    in.causal = parse_mentions(read_file(art.causal));
    if (!curated.empty()) in.curated = parse_curated_edges(read_file(curated));
    in.counts = &counts;
    in.contexts = &contexts;
    in.evidence_cap = static_cast<std::size_t>(config.get_int("build", "evidence_cap", 10));
    ElgGraph g = build_graph(in);
    stamp_graph_meta(g, config, art.corpus);
    save_graph(g, art.graph_raw);
    return std::to_string(g.nodes.size()) + " nodes, " + std::to_string(g.edges.size()) +
           " edges";
  }});

  defs.push_back({"merge",
                  {"merge", "count"},
                  {{art.graph_raw, "build"}, {art.vectors, "embed"}, {art.events, "extract"}},
                  {art.graph, art.merge_report},
                  [&] {
    const ElgGraph raw = load_graph(art.graph_raw);
    const EmbeddingTable table = load_vectors(art.vectors);
    const auto docs = load_events(art.events);
    MergeRecount recount{docs, count_options(config)};
    MergeReport rep;
    const ElgGraph merged = merge_similar_events(raw, table, merge_options(config), &rep, &recount);
    save_graph(merged, art.graph);
    std::string text = "nodes_before\t" + std::to_string(raw.nodes.size()) + "\n" +
                       "nodes_after\t" + std::to_string(merged.nodes.size()) + "\n" +
                       "clusters_merged\t" + std::to_string(rep.clusters_merged) + "\n" +
                       "dropped_self_loops\t" + std::to_string(rep.dropped_self_loops) + "\n" +
                       "dropped_self_loop_support\t" +
                       std::to_string(rep.dropped_self_loop_support) + "\n" +
                       "similarity_links\t" + std::to_string(merged.links.size()) + "\n" +
                       "missing_vectors\t" + std::to_string(rep.missing_vectors) + "\n";
    for (const auto& w : rep.warnings) text += "warning\t" + w + "\n";
    write_file(art.merge_report, text);
    return std::to_string(raw.nodes.size()) + " -> " + std::to_string(merged.nodes.size()) +
           " nodes, " + std::to_string(merged.links.size()) + " similarity links";
  }});

  defs.push_back({"evaluate",
                  {"mcnc"},
                  {{art.events, "extract"}, {art.counts, "count"}, {art.vectors, "embed"},
                   {art.graph, "merge"}},
                  {art.mcnc, art.mcnc_report, art.mcnc_table},
                  [&] {
    const auto docs = load_events(art.events);
    const PairCounts counts = PairCounts::parse(read_file(art.counts));
    const EmbeddingTable table = load_vectors(art.vectors);
    const ElgGraph graph = load_graph(art.graph);
    const auto chains = chains_from_documents(
        docs, static_cast<std::size_t>(config.get_int("mcnc", "chain_length", 9)));
    const auto instances = generate_mcnc(chains, counts.events(), mcnc_options(config));
    write_file(art.mcnc, serialize_mcnc(instances));
    std::vector<McncEvaluation> results;
    const auto seed = static_cast<std::uint64_t>(config.get_int("mcnc", "seed", 1));
    for (const auto& name : config.get_list("mcnc", "scorers",
                                            {"random", "pmi", "bigram", "embedding", "graph"})) {
      auto scorer = make_scorer(name, seed, &counts, &table, &graph);
      results.push_back(evaluate_mcnc(*scorer, instances));
    }
    write_file(art.mcnc_table, format_mcnc_report(results));
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
      if (results[i].accuracy > results[best].accuracy) best = i;
    std::string tsv = "method\taccuracy\tp_value\n";
    for (std::size_t i = 0; i < results.size(); ++i)
      tsv += results[i].method + "\t" + fmt2(results[i].accuracy) + "\t" +
             (i == best ? std::string("-")
                        : format_double(paired_t_test(results[i].correct, results[best].correct))) +
             "\n";
    write_file(art.mcnc_report, tsv);
    return std::to_string(instances.size()) + " MCNC instances, " +
           std::to_string(results.size()) + " scorers";
  }});

  nlohmann::json manifest = nlohmann::json::object();
  if (std::filesystem::exists(art.manifest)) {
    try {
      manifest = nlohmann::json::parse(read_file(art.manifest));
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object();  // unreadable manifest: rerun everything
    }
  }

  std::vector<StageReport> reports;
  for (const auto& def : defs) {
    if (!wanted.count(def.name)) continue;
    std::string key_text = def.name + "\n";
    for (const auto& s : def.sections) {
      const auto dot = s.find('.');
      if (dot == std::string::npos)
        key_text += config.section_text(s);
      else
        key_text += s + "=" + config.get(s.substr(0, dot), s.substr(dot + 1)) + "\n";
    }
    for (const auto& [path, producer] : def.inputs) {
      if (path.empty()) continue;
      if (producer.empty()) {
        if (!std::filesystem::exists(path))
          throw IoError("input file " + path.string() + " does not exist");
      } else {
        require_artifact(path, producer);
      }
      key_text += path.filename().string() + "=" + file_hash(path) + "\n";
    }
    const std::string key = hex64(fnv1a(key_text));

    bool fresh = manifest.contains(def.name) && manifest[def.name].value("key", "") == key;
    if (fresh)
      for (const auto& out : def.outputs) {
        const auto& outs = manifest[def.name]["outputs"];
        const std::string name = out.filename().string();
        if (!std::filesystem::exists(out) || !outs.contains(name) ||
            outs[name].get<std::string>() != file_hash(out)) {
          fresh = false;
          break;
        }
      }
    StageReport rep{def.name, fresh, ""};
    if (fresh) {
      rep.summary = "unchanged";
    } else {
      rep.summary = def.run();
      nlohmann::json outs = nlohmann::json::object();
      for (const auto& out : def.outputs) outs[out.filename().string()] = file_hash(out);
      manifest[def.name] = {{"key", key}, {"outputs", outs}};
      write_file(art.manifest, manifest.dump(2) + "\n");
    }
    if (log) *log << "[" << def.name << "] " << (fresh ? "skipped: " : "") << rep.summary << "\n";
    reports.push_back(std::move(rep));
  }

  if (wanted.count("serve")) {
    if (!std::filesystem::exists(art.graph) && !std::filesystem::exists(art.graph_raw))
      throw DataError("serve needs a graph artifact in " + art.dir.string() +
                      "; run the 'build' stage first");
    reports.push_back({"serve", false, "graph ready"});
  }
  return reports;
}

}  // namespace elg
