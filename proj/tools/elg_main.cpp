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


// elg: command-line front end. Exit codes: 0 ok, 1 usage or configuration,
// 2 data, 3 internal.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "elg/error.hpp"
#include "elg/pipeline.hpp"
#include "elg/service.hpp"
#include "elg/util.hpp"

namespace {

using namespace elg;
namespace fs = std::filesystem;

constexpr int kOk = 0, kUsage = 1, kData = 2, kInternal = 3;

struct Common {
  std::string config;
  std::vector<std::string> sets;  // section.key=value
};

Config make_config(const Common& common) {
  Config c = common.config.empty() ? Config{} : Config::load(common.config);
  c.apply_env(Config::process_env());
  for (const auto& s : common.sets) {
    const auto eq = s.find('=');
    const auto dot = s.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("--set expects section.key=value, got '" + s + "'");
    c.set(s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
  }
  return c;
}

// Flag values override config entries only when given.
struct Overrides {
  std::vector<std::tuple<std::string, std::string, std::optional<std::string>*>> items;
  void add(CLI::App* app, const std::string& flag, const std::string& section,
           const std::string& key, std::optional<std::string>& slot, const std::string& help) {
    app->add_option(flag, slot, help);
    items.emplace_back(section, key, &slot);
  }
  void apply(Config& c) const {
    for (const auto& [s, k, v] : items)
      if (*v) c.set(s, k, **v);
  }
};

ParsedCorpus read_corpus(const std::string& path, const std::string& format) {
  const CorpusFormat f = !format.empty()                          ? parse_corpus_format(format)
                         : fs::path(path).extension() == ".jsonl" ? CorpusFormat::kJsonl
                                                                  : CorpusFormat::kConllu;
  return load_corpus(path, f);
}

std::atomic<HttpServer*> g_server{nullptr};

void on_signal(int) {
  if (HttpServer* s = g_server.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event logic graph toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", common.sets, "Override a config entry: section.key=value");

  std::function<int()> action;

  // extract
  auto* extract = app.add_subcommand("extract", "Clean a parsed corpus and extract events");
  struct {
    std::string corpus, format, out, clean_out, blacklist;
  } ex;
  Overrides ex_ov;
  std::optional<std::string> ex_min_freq, ex_min_tok, ex_max_tok;
  extract->add_option("--corpus", ex.corpus, "Parsed corpus (conllu or jsonl)")->required();
  extract->add_option("--format", ex.format, "conllu | jsonl (default: by extension)");
  extract->add_option("--out", ex.out, "Event occurrences TSV")->required();
  extract->add_option("--clean-out", ex.clean_out, "Write the cleaned corpus (conllu)");
  extract->add_option("--blacklist", ex.blacklist, "Generality blacklist");
  ex_ov.add(extract, "--min-frequency", "extract", "min_frequency", ex_min_freq, "Event frequency threshold");
  ex_ov.add(extract, "--min-tokens", "ingest", "min_tokens", ex_min_tok, "Shortest sentence kept");
  ex_ov.add(extract, "--max-tokens", "ingest", "max_tokens", ex_max_tok, "Longest sentence kept");
  extract->callback([&] {
    action = [&] {
      Config c = make_config(common);
      ex_ov.apply(c);
      const ParsedCorpus clean = clean_corpus(read_corpus(ex.corpus, ex.format), clean_options(c));
      if (!ex.clean_out.empty()) save_corpus(clean, ex.clean_out, CorpusFormat::kConllu);
      const GeneralityBlacklist bl =
          ex.blacklist.empty() ? GeneralityBlacklist{} : GeneralityBlacklist::load(ex.blacklist);
      const auto docs = filter_corpus_events(
          extract_corpus_events(clean),
          static_cast<std::size_t>(c.get_int("extract", "min_frequency", 2)), bl);
      write_file(ex.out, serialize_events(docs));
      std::size_t n = 0;
      for (const auto& d : docs) n += d.events.size();
      std::cout << n << " event occurrences in " << docs.size() << " documents\n";
      return kOk;
    };
  });

  // count
  auto* count = app.add_subcommand("count", "Count events and co-occurring pairs");
  struct {
    std::string corpus, events, out;
  } co;
  Overrides co_ov;
  std::optional<std::string> co_window;
  count->add_option("--corpus", co.corpus, "Cleaned corpus, for token totals");
  count->add_option("--events", co.events, "Event occurrences TSV")->required();
  count->add_option("--out", co.out, "Counts file")->required();
  co_ov.add(count, "--window", "count", "window", co_window, "Sentence window");
  count->callback([&] {
    action = [&] {
      Config c = make_config(common);
      co_ov.apply(c);
      const auto docs = parse_events(read_file(co.events));
      std::optional<ParsedCorpus> corpus;
      if (!co.corpus.empty()) corpus = read_corpus(co.corpus, "");
      const PairCounts counts = count_pairs(docs, count_options(c), corpus ? &*corpus : nullptr);
      write_file(co.out, counts.serialize());
      std::cout << counts.events().size() << " events, " << counts.pairs().size() << " pairs\n";
      return kOk;
    };
  });

  // features
  auto* features = app.add_subcommand("features", "Write pair feature vectors");
  struct {
    std::string corpus, events, vectors, pairs, out;
  } fe;
  Overrides fe_ov;
  std::optional<std::string> fe_window;
  features->add_option("--corpus", fe.corpus, "Cleaned corpus")->required();
  features->add_option("--events", fe.events, "Event occurrences TSV")->required();
  features->add_option("--vectors", fe.vectors, "Word vectors")->required();
  features->add_option("--pairs", fe.pairs, "Pairs 'a<TAB>b' (default: all co-occurring)");
  features->add_option("--out", fe.out, "Feature TSV")->required();
  fe_ov.add(features, "--window", "count", "window", fe_window, "Sentence window");
  features->callback([&] {
    action = [&] {
      Config c = make_config(common);
      fe_ov.apply(c);
      const ParsedCorpus corpus = read_corpus(fe.corpus, "");
      const auto docs = parse_events(read_file(fe.events));
      ContextIndex contexts;
      const PairCounts counts = count_pairs(docs, count_options(c), &corpus, &contexts);
      const EmbeddingTable table = load_vectors(fe.vectors);
      std::vector<DirectedPair> pairs;
      if (!fe.pairs.empty()) {
        pairs = parse_directed_pairs(read_file(fe.pairs));
      } else {
        for (const auto& [k, v] : counts.pairs()) pairs.push_back({k.first, k.second});
      }
      const FeatureOptions opts;
      const FeatureLayout layout = opts.layout(table.dim());
      std::string out = "a\tb\t" + join(layout.column_names(opts.pos_inventory), "\t") + "\n";
      static const std::vector<CoOccurrenceContext> kNone;
      for (const auto& p : pairs) {
        auto it = contexts.find(make_pair_key(p.from, p.to));
        const FeatureVector fv = build_feature_vector(
            p.from, p.to, counts, it == contexts.end() ? kNone : it->second, table, opts);
        out += p.from + "\t" + p.to;
        for (Eigen::Index i = 0; i < fv.values.size(); ++i) out += "\t" + format_double(fv.values[i]);
        out += "\n";
      }
      write_file(fe.out, out);
      std::cout << pairs.size() << " feature vectors of width " << layout.size() << "\n";
      return kOk;
    };
  });

  // train-seqrel
  auto* train = app.add_subcommand("train-seqrel", "Cross-validate sequential relation classifiers");
  struct {
    std::string corpus, events, vectors, annotations, task = "relation", out;
    bool search = false;
  } tr;
  Overrides tr_ov;
  std::optional<std::string> tr_cls, tr_feat, tr_folds, tr_repeats, tr_seed, tr_window;
  train->add_option("--corpus", tr.corpus, "Cleaned corpus")->required();
  train->add_option("--events", tr.events, "Event occurrences TSV")->required();
  train->add_option("--vectors", tr.vectors, "Word vectors")->required();
  train->add_option("--annotations", tr.annotations, "Annotated pairs TSV")->required();
  train->add_option("--task", tr.task, "relation | direction")
      ->check(CLI::IsMember({"relation", "direction"}));
  train->add_option("--out", tr.out, "Report TSV");
  train->add_flag("--search", tr.search, "Evaluate all 15 feature group subsets");
  tr_ov.add(train, "--classifier", "classify", "classifier", tr_cls, "nb | lr | mlp | svm | all");
  tr_ov.add(train, "--features", "classify", "features", tr_feat, "all, 1..15 or e.g. frequency+pmi");
  tr_ov.add(train, "--folds", "classify", "folds", tr_folds, "Folds");
  tr_ov.add(train, "--repeats", "classify", "repeats", tr_repeats, "Repeats");
  tr_ov.add(train, "--seed", "classify", "seed", tr_seed, "Seed");
  tr_ov.add(train, "--window", "count", "window", tr_window, "Sentence window");
  train->callback([&] {
    action = [&] {
      Config c = make_config(common);
      tr_ov.apply(c);
      const bool all_kinds = c.get("classify", "classifier", "lr") == "all";
      if (all_kinds) c.set("classify", "classifier", "lr");
      const SeqrelSettings base = seqrel_settings(c);
      const ParsedCorpus corpus = read_corpus(tr.corpus, "");
      const auto docs = parse_events(read_file(tr.events));
      ContextIndex contexts;
      const PairCounts counts = count_pairs(docs, count_options(c), &corpus, &contexts);
      const EmbeddingTable table = load_vectors(tr.vectors);
      const auto labeled = label_pairs(load_annotations(tr.annotations), counts, contexts, table);
      const Task task = tr.task == "relation" ? Task::kRelation : Task::kDirection;
      std::vector<ClassifierKind> kinds{base.kind};
      if (all_kinds)
        kinds = {ClassifierKind::kNaiveBayes, ClassifierKind::kLogistic, ClassifierKind::kMlp,
                 ClassifierKind::kSvm};
      std::vector<ReportRow> rows;
      if (tr.search) {
        const Dataset data = Dataset::from_pairs(labeled, task);
        std::vector<std::pair<std::string, LearnerFactory>> learners;
        for (auto k : kinds) learners.emplace_back(to_string(k), classifier_factory(k, base.hyper, data.layout));
        const SearchResult res = feature_group_search(learners, data, base.cv);
        for (const auto& r : res.rows) rows.push_back({mask_name(r.mask), r.classifier, r.metrics});
        std::vector<ReportRow> best;
        for (const auto& r : res.best) best.push_back({mask_name(r.mask), r.classifier, r.metrics});
        std::cout << "Best feature groups per classifier\n" << format_report(best);
      } else {
        for (std::size_t i = 0; i < kinds.size(); ++i) {
          SeqrelSettings s = base;
          s.kind = kinds[i];
          auto r = seqrel_cv_rows(labeled, task, s);
          if (i + 1 < kinds.size()) r.pop_back();  // baseline once
          rows.insert(rows.end(), r.begin(), r.end());
        }
        std::cout << format_report(rows);
      }
      if (!tr.out.empty()) write_file(tr.out, report_tsv(rows));
      return kOk;
    };
  });

  // causality
  auto* causal = app.add_subcommand("causality", "Apply causal rule templates");
  struct {
    std::string corpus, rules, out, gold, bio_out;
  } ca;
  causal->add_option("--corpus", ca.corpus, "Cleaned corpus");
  causal->add_option("--rules", ca.rules, "Rule file")->required();
  causal->add_option("--out", ca.out, "Mentions TSV");
  causal->add_option("--gold", ca.gold, "Gold BIO file to evaluate against");
  causal->add_option("--bio-out", ca.bio_out, "Write predicted BIO tags for the gold sentences");
  causal->callback([&] {
    action = [&] {
      std::vector<std::string> warnings;
      const auto rules = load_rules(ca.rules, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      if (ca.corpus.empty() && ca.gold.empty())
        throw ConfigError("causality needs --corpus or --gold");
      if (!ca.corpus.empty()) {
        const auto mentions = extract_causal_mentions(read_corpus(ca.corpus, ""), rules);
        if (!ca.out.empty()) write_file(ca.out, serialize_mentions(mentions));
        std::cout << mentions.size() << " causal mentions\n";
      }
      if (!ca.gold.empty()) {
        const GoldCorpus gold = load_gold(ca.gold);
        std::vector<CausalMention> pred;
        std::vector<ParsedSentence> sentences;
        std::string bio;
        for (const auto& d : gold.corpus.documents)
          for (const auto& s : d.sentences) {
            auto m = apply_rules(s, rules);
            const auto tags = to_bio(s, m);
            for (std::size_t i = 0; i < tags.size(); ++i)
              bio += s.tokens[i].surface + "\t" + to_string(tags[i]) + "\n";
            bio += "\n";
            pred.insert(pred.end(), m.begin(), m.end());
            sentences.push_back(s);
          }
        if (!ca.bio_out.empty()) write_file(ca.bio_out, bio);
        const EvalMetrics m = evaluate_extraction(pred, gold.mentions, sentences);
        std::printf("span precision %.2f  recall %.2f  F1 %.2f  token accuracy %.2f\n",
                    m.precision, m.recall, m.f1, m.accuracy);
      }
      return kOk;
    };
  });

  // embed
  auto* embed = app.add_subcommand("embed", "Train skip-gram word vectors");
  struct {
    std::string corpus, out;
  } em;
  Overrides em_ov;
  std::optional<std::string> em_dim, em_win, em_ep, em_neg, em_min, em_lr, em_seed;
  embed->add_option("--corpus", em.corpus, "Cleaned corpus")->required();
  embed->add_option("--out", em.out, "Vector file")->required();
  em_ov.add(embed, "--dim", "embed", "dim", em_dim, "Dimensions");
  em_ov.add(embed, "--window", "embed", "window", em_win, "Context window");
  em_ov.add(embed, "--epochs", "embed", "epochs", em_ep, "Epochs");
  em_ov.add(embed, "--negative", "embed", "negative", em_neg, "Negative samples");
  em_ov.add(embed, "--min-count", "embed", "min_count", em_min, "Minimum word count");
  em_ov.add(embed, "--learning-rate", "embed", "learning_rate", em_lr, "Initial learning rate");
  em_ov.add(embed, "--seed", "embed", "seed", em_seed, "Seed");
  embed->callback([&] {
    action = [&] {
      Config c = make_config(common);
      em_ov.apply(c);
      TrainReport rep;
      const EmbeddingTable t = train_skipgram(read_corpus(em.corpus, ""), skipgram_options(c), &rep);
      save_vectors(t, em.out);
      std::cout << t.size() << " words x " << t.dim() << "\n";
      return kOk;
    };
  });

  // build-graph
  auto* build = app.add_subcommand("build-graph", "Assemble the graph from classified pairs and mentions");
  struct {
    std::string counts, pairs, causal, curated, corpus, events, out;
  } bu;
  Overrides bu_ov;
  std::optional<std::string> bu_window;
  build->add_option("--counts", bu.counts, "Counts file")->required();
  build->add_option("--pairs", bu.pairs, "Directed sequential pairs 'from<TAB>to'");
  build->add_option("--causal", bu.causal, "Causal mentions TSV");
  build->add_option("--curated", bu.curated, "Curated conditional / hypernym-hyponym edges");
  build->add_option("--corpus", bu.corpus, "Cleaned corpus, for evidence");
  build->add_option("--events", bu.events, "Event occurrences, for evidence");
  build->add_option("--out", bu.out, "Graph file")->required();
  bu_ov.add(build, "--window", "count", "window", bu_window, "Sentence window used for counts");
  build->callback([&] {
    action = [&] {
      Config c = make_config(common);
      bu_ov.apply(c);
      const PairCounts counts = PairCounts::parse(read_file(bu.counts));
      ContextIndex contexts;
      GraphInputs in;
      in.counts = &counts;
      if (!bu.corpus.empty() && !bu.events.empty()) {
        const ParsedCorpus corpus = read_corpus(bu.corpus, "");
        count_pairs(parse_events(read_file(bu.events)), count_options(c), &corpus, &contexts);
        in.contexts = &contexts;
      }
      if (!bu.pairs.empty()) in.sequential = parse_directed_pairs(read_file(bu.pairs));
      if (!bu.causal.empty()) in.causal = parse_mentions(read_file(bu.causal));
      if (!bu.curated.empty()) in.curated = parse_curated_edges(read_file(bu.curated));
      in.evidence_cap = static_cast<std::size_t>(c.get_int("build", "evidence_cap", 10));
      ElgGraph g = build_graph(in);
      stamp_graph_meta(g, c, bu.corpus);
      save_graph(g, bu.out);
      std::cout << g.nodes.size() << " nodes, " << g.edges.size() << " edges\n";
      return kOk;
    };
  });

  // merge
  auto* merge = app.add_subcommand("merge", "Merge similar events and add similarity links");
  struct {
    std::string graph, vectors, events, out;
  } me;
  Overrides me_ov;
  std::optional<std::string> me_tm, me_tl, me_window;
  merge->add_option("--graph", me.graph, "Input graph")->required();
  merge->add_option("--vectors", me.vectors, "Word vectors")->required();
  merge->add_option("--events", me.events, "Event occurrences, for exact probability recount");
  merge->add_option("--out", me.out, "Output graph")->required();
  me_ov.add(merge, "--tau-merge", "merge", "tau_merge", me_tm, "Merge threshold");
  me_ov.add(merge, "--tau-link", "merge", "tau_link", me_tl, "Link threshold");
  me_ov.add(merge, "--window", "count", "window", me_window, "Sentence window for the recount");
  merge->callback([&] {
    action = [&] {
      Config c = make_config(common);
      me_ov.apply(c);
      const ElgGraph g = load_graph(me.graph);
      const EmbeddingTable t = load_vectors(me.vectors);
      std::vector<DocumentEvents> docs;
      std::optional<MergeRecount> recount;
      if (!me.events.empty()) {
        docs = parse_events(read_file(me.events));
        recount = MergeRecount{docs, count_options(c)};
      }
      MergeReport rep;
      const ElgGraph out = merge_similar_events(g, t, merge_options(c), &rep, recount ? &*recount : nullptr);
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
      save_graph(out, me.out);
      std::cout << g.nodes.size() << " -> " << out.nodes.size() << " nodes, "
                << rep.dropped_self_loops << " self-loops dropped, " << out.links.size()
                << " similarity links\n";
      return kOk;
    };
  });

  // mcnc
  auto* mcnc = app.add_subcommand("mcnc", "Generate multiple-choice narrative cloze instances");
  struct {
    std::string events, counts, out;
  } mc;
  Overrides mc_ov;
  std::optional<std::string> mc_len, mc_n, mc_pol, mc_seed;
  mcnc->add_option("--events", mc.events, "Event occurrences TSV")->required();
  mcnc->add_option("--counts", mc.counts, "Counts file (event vocabulary)")->required();
  mcnc->add_option("--out", mc.out, "Instance file")->required();
  mc_ov.add(mcnc, "--chain-length", "mcnc", "chain_length", mc_len, "Events per chain (0 = document)");
  mc_ov.add(mcnc, "--n-candidates", "mcnc", "n_candidates", mc_n, "Candidates per instance");
  mc_ov.add(mcnc, "--policy", "mcnc", "policy", mc_pol, "frequency | uniform");
  mc_ov.add(mcnc, "--seed", "mcnc", "seed", mc_seed, "Seed");
  mcnc->callback([&] {
    action = [&] {
      Config c = make_config(common);
      mc_ov.apply(c);
      const auto docs = parse_events(read_file(mc.events));
      const PairCounts counts = PairCounts::parse(read_file(mc.counts));
      const auto chains = chains_from_documents(
          docs, static_cast<std::size_t>(c.get_int("mcnc", "chain_length", 9)));
      const auto inst = generate_mcnc(chains, counts.events(), mcnc_options(c));
      write_file(mc.out, serialize_mcnc(inst));
      std::cout << inst.size() << " instances\n";
      return kOk;
    };
  });

  // report
  auto* report = app.add_subcommand("report", "Compare MCNC scorers");
  struct {
    std::string compare = "random,pmi,bigram,embedding,graph", instances, counts, vectors, graph, out;
  } re;
  Overrides re_ov;
  std::optional<std::string> re_seed;
  report->add_option("--compare", re.compare, "Comma-separated scorers");
  report->add_option("--instances", re.instances, "MCNC instance file")->required();
  report->add_option("--counts", re.counts, "Counts file (pmi, bigram)");
  report->add_option("--vectors", re.vectors, "Word vectors (embedding, graph resolution)");
  report->add_option("--graph", re.graph, "Graph file (graph)");
  report->add_option("--out", re.out, "Report TSV");
  re_ov.add(report, "--seed", "mcnc", "seed", re_seed, "Seed for the random scorer");
  report->callback([&] {
    action = [&] {
      Config c = make_config(common);
      re_ov.apply(c);
      const auto inst = parse_mcnc(read_file(re.instances));
      std::optional<PairCounts> counts;
      std::optional<EmbeddingTable> table;
      std::optional<ElgGraph> graph;
      if (!re.counts.empty()) counts = PairCounts::parse(read_file(re.counts));
      if (!re.vectors.empty()) table = load_vectors(re.vectors);
      if (!re.graph.empty()) graph = load_graph(re.graph);
      std::vector<McncEvaluation> results;
      for (const auto& name : split(re.compare, ',')) {
        auto scorer = make_scorer(std::string(trim(name)),
                                  static_cast<std::uint64_t>(c.get_int("mcnc", "seed", 1)),
                                  counts ? &*counts : nullptr, table ? &*table : nullptr,
                                  graph ? &*graph : nullptr);
        results.push_back(evaluate_mcnc(*scorer, inst));
      }
      std::cout << format_mcnc_report(results);
      if (!re.out.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < results.size(); ++i)
          if (results[i].accuracy > results[best].accuracy) best = i;
        std::string tsv = "method\taccuracy\tp_value\n";
        for (std::size_t i = 0; i < results.size(); ++i)
          tsv += results[i].method + "\t" + format_double(results[i].accuracy) + "\t" +
                 (i == best ? std::string("-")
                            : format_double(paired_t_test(results[i].correct, results[best].correct))) +
                 "\n";
        write_file(re.out, tsv);
      }
      return kOk;
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the read-only query API");
  struct {
    std::string graph, corpus;
    double max_seconds = 0;
  } se;
  Overrides se_ov;
  std::optional<std::string> se_host, se_port, se_cap, se_depth, se_cors;
  serve->add_option("--graph", se.graph, "Graph file")->required();
  serve->add_option("--corpus", se.corpus, "Cleaned corpus, to show evidence sentences");
  serve->add_option("--max-seconds", se.max_seconds, "Stop after this many seconds (0 = never)");
  se_ov.add(serve, "--host", "service", "host", se_host, "Bind address");
  se_ov.add(serve, "--port", "service", "port", se_port, "Port (0 = ephemeral)");
  se_ov.add(serve, "--node-cap", "service", "node_cap", se_cap, "Nodes per response");
  se_ov.add(serve, "--max-depth", "service", "max_depth", se_depth, "Deepest neighbor query");
  se_ov.add(serve, "--cors", "service", "cors", se_cors, "Comma-separated allowed origins");
  serve->callback([&] {
    action = [&] {
      Config c = make_config(common);
      se_ov.apply(c);
      ServiceConfig sc = service_config(c);
      sc.graph_path = se.graph;
      sc.corpus_path = se.corpus;
      QueryService service(sc);
      service.load_from_config();
      HttpServer server(service);
      const int port = server.bind();
      std::cout << "listening on http://" << sc.host << ":" << port << std::endl;
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread timer;
      if (se.max_seconds > 0)
        timer = std::thread([&] {
          std::this_thread::sleep_for(std::chrono::duration<double>(se.max_seconds));
          server.stop();
        });
      server.listen();
      if (timer.joinable()) timer.join();
      g_server = nullptr;
      return kOk;
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Run pipeline stages from a config file");
  std::vector<std::string> run_stages;
  std::optional<std::string> run_output;
  run->add_option("--stages", run_stages, "Stages to run (default: config or all)")->delimiter(',');
  run->add_option("--output", run_output, "Output directory");
  run->callback([&] {
    action = [&] {
      if (common.config.empty()) throw ConfigError("run needs --config");
      Config c = make_config(common);
      if (run_output) c.set("paths", "output", fs::absolute(*run_output).string());
      auto stages = run_stages.empty()
                        ? c.get_list("pipeline", "stages", kPipelineStages)
                        : run_stages;
      const auto reports = run_pipeline(c, stages, &std::cerr);
      const bool serve_wanted = std::find(stages.begin(), stages.end(), "serve") != stages.end();
      if (!serve_wanted) return kOk;
      Artifacts art(c.get_path("paths", "output").empty() ? fs::path("out")
                                                          : c.get_path("paths", "output"));
      ServiceConfig sc = service_config(c);
      sc.graph_path = fs::exists(art.graph) ? art.graph : art.graph_raw;
      sc.corpus_path = art.corpus;
      QueryService service(sc);
      service.load_from_config();
      HttpServer server(service);
      const int port = server.bind();
      std::cout << "listening on http://" << sc.host << ":" << port << std::endl;
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      g_server = nullptr;
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
