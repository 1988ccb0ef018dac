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


#include "elg/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "elg/error.hpp"
#include "elg/util.hpp"
#include "json.hpp"

namespace elg {

using nlohmann::json;

std::string ParsedSentence::text() const {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.surface;
  }
  return out;
}

bool same_content(const ParsedSentence& a, const ParsedSentence& b) {
  return a.tokens == b.tokens;
}

std::size_t ParsedCorpus::sentence_count() const {
  std::size_t n = 0;
  for (const Document& d : documents) n += d.sentences.size();
  return n;
}

std::size_t ParsedCorpus::token_count() const {
  std::size_t n = 0;
  for (const Document& d : documents)
    for (const ParsedSentence& s : d.sentences) n += s.tokens.size();
  return n;
}

const ParsedSentence* ParsedCorpus::find(const std::string& doc_id,
                                         int sent_index) const {
  for (const Document& d : documents) {
    if (d.doc_id != doc_id) continue;
    for (const ParsedSentence& s : d.sentences)
      if (s.sent_index == sent_index) return &s;
  }
  return nullptr;
}

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "conllu" || name == "conllu-like") return CorpusFormat::kConllu;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  throw ConfigError("unsupported corpus format: " + name);
}

bool is_well_formed(const ParsedSentence& sentence) {
  const int n = static_cast<int>(sentence.tokens.size());
  if (n == 0) return false;
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = sentence.tokens[i];
    if (t.index != i + 1) return false;
    if (t.head < 0 || t.head > n || t.head == t.index) return false;
    if (t.deprel.empty()) return false;
    if (t.head == 0) ++roots;
  }
  return roots == 1;
}

namespace {

// Accumulates documents in input order while enforcing unique doc ids and
// contiguous sentence numbering over kept sentences.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(LoadReport* report) : report_(report) {}

  void start_document(const std::string& doc_id) {
    if (!seen_.insert(doc_id).second)
      throw DataError("duplicate doc_id: " + doc_id);
    corpus_.documents.push_back(Document{doc_id, {}});
  }

  void add_sentence(ParsedSentence sentence, bool parsed_ok) {
    if (corpus_.documents.empty()) start_document("default");
    Document& doc = corpus_.documents.back();
    sentence.doc_id = doc.doc_id;
    sentence.sent_index = static_cast<int>(doc.sentences.size());
    if (parsed_ok && is_well_formed(sentence)) {
      doc.sentences.push_back(std::move(sentence));
      ++kept_;
    } else {
      ++dropped_;
    }
  }

  ParsedCorpus finish() {
    if (report_ != nullptr) {
      report_->documents = corpus_.documents.size();
      report_->sentences_kept = kept_;
      report_->sentences_dropped = dropped_;
    }
    if (kept_ == 0) throw EmptyCorpusError("corpus contains no valid sentences");
    return std::move(corpus_);
  }

 private:
  LoadReport* report_;
  ParsedCorpus corpus_;
  std::unordered_set<std::string> seen_;
  std::size_t kept_ = 0;
  std::size_t dropped_ = 0;
};

bool parse_token_line(const std::string& line, Token& token, bool& skip) {
  skip = false;
  std::vector<std::string> cols = split(line, '\t');
  if (cols.size() < 6) return false;
  // Multiword ranges ("1-2") and empty nodes ("1.1") carry no dependency arc.
  if (cols[0].find_first_of("-.") != std::string::npos) {
    skip = true;
    return true;
  }
  const bool conllu10 = cols.size() >= 8 && cols.size() != 7;
  const std::string& head_col = conllu10 ? cols[6] : cols[4];
  const std::string& rel_col = conllu10 ? cols[7] : cols[5];
  long long index = 0;
  long long head = 0;
  if (!parse_int(cols[0], index) || !parse_int(head_col, head)) return false;
  token.index = static_cast<int>(index);
  token.surface = cols[1];
  token.lemma = cols[2];
  token.pos = cols[3];
  token.head = static_cast<int>(head);
  token.deprel = rel_col;
  return true;
}

}  // namespace

ParsedCorpus parse_conllu(const std::string& text, LoadReport* report) {
  CorpusBuilder builder(report);
  ParsedSentence current;
  bool ok = true;
  bool open = false;
  auto flush = [&] {
    if (open) builder.add_sentence(std::move(current), ok);
    current = ParsedSentence{};
    ok = true;
    open = false;
  };
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      if (starts_with(body, "doc_id")) {
        std::size_t eq = body.find('=');
        if (eq != std::string_view::npos) {
          flush();
          builder.start_document(std::string(trim(body.substr(eq + 1))));
        }
      }
      continue;
    }
    open = true;
    Token token;
    bool skip = false;
    if (!parse_token_line(raw, token, skip)) {
      ok = false;
    } else if (!skip) {
      current.tokens.push_back(std::move(token));
    }
  }
  flush();
  return builder.finish();
}

ParsedCorpus parse_jsonl(const std::string& text, LoadReport* report) {
  CorpusBuilder builder(report);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("doc_id") || !doc["doc_id"].is_string())
      throw DataError("jsonl line " + std::to_string(line_no) + ": missing doc_id");
    builder.start_document(doc["doc_id"].get<std::string>());
    if (!doc.contains("sentences")) continue;
    for (const json& sent : doc["sentences"]) {
      ParsedSentence sentence;
      bool ok = sent.is_array();
      if (ok) {
        try {
          for (const json& t : sent) {
            Token token;
            token.index = t.at("index").get<int>();
            token.surface = t.at("surface").get<std::string>();
            token.lemma = t.value("lemma", token.surface);
            token.pos = t.at("pos").get<std::string>();
            token.head = t.at("head").get<int>();
            token.deprel = t.at("deprel").get<std::string>();
            sentence.tokens.push_back(std::move(token));
          }
        } catch (const json::exception&) {
          ok = false;
        }
      }
      builder.add_sentence(std::move(sentence), ok);
    }
  }
  return builder.finish();
}

ParsedCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                         LoadReport* report) {
  const std::string text = read_file(path);
  ParsedCorpus corpus = format == CorpusFormat::kConllu
                            ? parse_conllu(text, report)
                            : parse_jsonl(text, report);
  corpus.source_meta["path"] = path.string();
  corpus.source_meta["format"] =
      format == CorpusFormat::kConllu ? "conllu" : "jsonl";
  return corpus;
}

void write_conllu(const ParsedCorpus& corpus, std::ostream& out) {
  for (const Document& doc : corpus.documents) {
    out << "# doc_id = " << doc.doc_id << '\n';
    for (const ParsedSentence& s : doc.sentences) {
      for (const Token& t : s.tokens) {
        out << t.index << '\t' << t.surface << '\t' << t.lemma << '\t' << t.pos
            << '\t' << t.head << '\t' << t.deprel << '\n';
      }
      out << '\n';
    }
  }
}

void write_jsonl(const ParsedCorpus& corpus, std::ostream& out) {
  for (const Document& doc : corpus.documents) {
    json sentences = json::array();
    for (const ParsedSentence& s : doc.sentences) {
      json tokens = json::array();
      for (const Token& t : s.tokens) {
        tokens.push_back({{"index", t.index},
                          {"surface", t.surface},
                          {"lemma", t.lemma},
                          {"pos", t.pos},
                          {"head", t.head},
                          {"deprel", t.deprel}});
      }
      sentences.push_back(std::move(tokens));
    }
    json line = {{"doc_id", doc.doc_id}, {"sentences", std::move(sentences)}};
    out << line.dump() << '\n';
  }
}

void save_corpus(const ParsedCorpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format) {
  std::ostringstream out;
  if (format == CorpusFormat::kConllu) {
    write_conllu(corpus, out);
  } else {
    write_jsonl(corpus, out);
  }
  write_file(path, out.str());
}

std::vector<ParsedSentence> clean_document(std::span<const ParsedSentence> raw,
                                           const CleanOptions& options) {
  std::vector<ParsedSentence> out;
  const ParsedSentence* previous = nullptr;
  for (const ParsedSentence& s : raw) {
    if (s.tokens.size() < options.min_tokens || s.tokens.size() > options.max_tokens)
      continue;
    if (previous != nullptr && same_content(*previous, s)) continue;
    out.push_back(s);
    previous = &s;
  }
  return out;
}

namespace {

std::uint64_t document_hash(const Document& doc) {
  std::uint64_t h = fnv1a("");
  for (const ParsedSentence& s : doc.sentences) {
    for (const Token& t : s.tokens) {
      h = fnv1a(t.surface, h);
      h = fnv1a("\t", h);
      h = fnv1a(t.lemma + "\t" + t.pos + "\t" + std::to_string(t.head) + "\t" +
                    t.deprel + "\n",
                h);
    }
    h = fnv1a("\n", h);
  }
  return h;
}

}  // namespace

ParsedCorpus clean_corpus(const ParsedCorpus& corpus, const CleanOptions& options) {
  ParsedCorpus out;
  out.source_meta = corpus.source_meta;
  std::set<std::uint64_t> seen;
  for (const Document& doc : corpus.documents) {
    Document cleaned{doc.doc_id, clean_document(doc.sentences, options)};
    if (cleaned.sentences.empty()) continue;
    for (std::size_t i = 0; i < cleaned.sentences.size(); ++i)
      cleaned.sentences[i].sent_index = static_cast<int>(i);
    if (!seen.insert(document_hash(cleaned)).second) continue;
    out.documents.push_back(std::move(cleaned));
  }
  return out;
}

}  // namespace elg
