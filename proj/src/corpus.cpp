#include "erg/corpus.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "erg/rng.hpp"

namespace erg::corpus {

using nlohmann::json;

std::size_t Document::sentence_of_token(std::size_t token) const {
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    if (token >= sentences[k].begin && token < sentences[k].end) {
      return k;
    }
  }
  throw std::invalid_argument("document '" + doc_id + "': token " +
                              std::to_string(token) +
                              " lies outside every sentence span");
}

void Document::validate() const {
  const std::size_t n = tokens.size();
  std::size_t prev_end = 0;
  bool first = true;
  for (const auto& span : sentences) {
    if (span.begin >= span.end) {
      throw std::invalid_argument("document '" + doc_id + "': empty sentence span");
    }
    if (span.end > n) {
      throw std::invalid_argument("document '" + doc_id +
                                  "': sentence span exceeds token count");
    }
    if (!first && span.begin < prev_end) {
      throw std::invalid_argument("document '" + doc_id +
                                  "': sentence spans overlap or are unordered");
    }
    prev_end = span.end;
    first = false;
  }
  if (gold_bias && gold_bias->size() != sentences.size()) {
    throw std::invalid_argument(
        "document '" + doc_id + "': gold_bias length " +
        std::to_string(gold_bias->size()) + " != sentence count " +
        std::to_string(sentences.size()));
  }
  if (basil && basil->size() != sentences.size()) {
    throw std::invalid_argument("document '" + doc_id +
                                "': basil annotation length != sentence count");
  }
  if (biasedsents && biasedsents->size() != sentences.size()) {
    throw std::invalid_argument("document '" + doc_id +
                                "': biasedsents annotation length != sentence count");
  }
  if (gold_events) {
    for (const std::size_t e : *gold_events) {
      sentence_of_token(e);  // throws when outside all spans
    }
  }
  if (gold_relations) {
    for (const auto& rel : *gold_relations) {
      if (rel.first >= n || rel.second >= n) {
        throw std::invalid_argument("document '" + doc_id +
                                    "': relation endpoint out of token range");
      }
    }
  }
}

const Document* Corpus::find(const std::string& doc_id) const {
  for (const auto& d : documents) {
    if (d.doc_id == doc_id) {
      return &d;
    }
  }
  return nullptr;
}

int binarize_basil(bool lexical, bool informational) {
  return (lexical || informational) ? 1 : 0;
}

int binarize_biasedsents(const std::array<int, 5>& scales) {
  int votes = 0;
  for (const int s : scales) {
    if (s < 1 || s > 4) {
      throw std::invalid_argument("biasedsents scale " + std::to_string(s) +
                                  " outside 1..4");
    }
    votes += (s >= 3) ? 1 : 0;
  }
  return votes >= 3 ? 1 : 0;
}

void derive_bias_labels(Document& doc) {
  if (doc.gold_bias) {
    return;
  }
  if (doc.basil) {
    std::vector<int> labels;
    labels.reserve(doc.basil->size());
    for (const auto& a : *doc.basil) {
      labels.push_back(binarize_basil(a.lexical, a.informational));
    }
    doc.gold_bias = std::move(labels);
  } else if (doc.biasedsents) {
    std::vector<int> labels;
    labels.reserve(doc.biasedsents->size());
    for (const auto& scales : *doc.biasedsents) {
      labels.push_back(binarize_biasedsents(scales));
    }
    doc.gold_bias = std::move(labels);
  }
}

namespace {

Document parse_document(const json& j) {
  Document doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.tokens = j.at("tokens").get<std::vector<std::string>>();
  for (const auto& pair : j.at("sentences")) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("field 'sentences': expected [begin, end] pairs");
    }
    doc.sentences.push_back(
        SentenceSpan{pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
  }
  if (j.contains("gold_bias")) {
    doc.gold_bias = j.at("gold_bias").get<std::vector<int>>();
  }
  if (j.contains("gold_events")) {
    doc.gold_events = j.at("gold_events").get<std::vector<std::size_t>>();
  }
  if (j.contains("gold_relations")) {
    std::vector<RelationAnnotation> rels;
    for (const auto& r : j.at("gold_relations")) {
      RelationAnnotation rel;
      rel.first = r.at("pair").at(0).get<std::size_t>();
      rel.second = r.at("pair").at(1).get<std::size_t>();
      rel.family = r.at("family").get<std::string>();
      rel.label = r.at("label").get<std::string>();
      rels.push_back(std::move(rel));
    }
    doc.gold_relations = std::move(rels);
  }
  if (j.contains("annotations")) {
    const auto& ann = j.at("annotations");
    if (ann.contains("basil")) {
      std::vector<BasilSentenceAnnotation> rows;
      for (const auto& r : ann.at("basil")) {
        rows.push_back(BasilSentenceAnnotation{r.at("lexical").get<bool>(),
                                               r.at("informational").get<bool>()});
      }
      doc.basil = std::move(rows);
    }
    if (ann.contains("biasedsents")) {
      std::vector<std::array<int, 5>> rows;
      for (const auto& r : ann.at("biasedsents")) {
        if (!r.is_array() || r.size() != 5) {
          throw std::invalid_argument(
              "field 'annotations.biasedsents': expected exactly five scores");
        }
        std::array<int, 5> scales{};
        for (std::size_t i = 0; i < 5; ++i) {
          scales[i] = r[i].get<int>();
        }
        rows.push_back(scales);
      }
      doc.biasedsents = std::move(rows);
    }
  }
  return doc;
}

json document_to_json(const Document& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["tokens"] = doc.tokens;
  json spans = json::array();
  for (const auto& s : doc.sentences) {
    spans.push_back(json::array({s.begin, s.end}));
  }
  j["sentences"] = spans;
  if (doc.gold_bias) j["gold_bias"] = *doc.gold_bias;
  if (doc.gold_events) j["gold_events"] = *doc.gold_events;
  if (doc.gold_relations) {
    json rels = json::array();
    for (const auto& r : *doc.gold_relations) {
      rels.push_back({{"pair", json::array({r.first, r.second})},
                      {"family", r.family},
                      {"label", r.label}});
    }
    j["gold_relations"] = rels;
  }
  json ann;
  if (doc.basil) {
    json rows = json::array();
    for (const auto& a : *doc.basil) {
      rows.push_back({{"lexical", a.lexical}, {"informational", a.informational}});
    }
    ann["basil"] = rows;
  }
  if (doc.biasedsents) {
    json rows = json::array();
    for (const auto& scales : *doc.biasedsents) {
      rows.push_back(scales);
    }
    ann["biasedsents"] = rows;
  }
  if (!ann.is_null()) j["annotations"] = ann;
  return j;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path);
  }
  Corpus corpus;
  corpus.name = path;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      const json j = json::parse(line);
      Document doc = parse_document(j);
      derive_bias_labels(doc);
      doc.validate();
      if (!seen_ids.insert(doc.doc_id).second) {
        throw std::invalid_argument("duplicate doc_id '" + doc.doc_id + "'");
      }
      corpus.documents.push_back(std::move(doc));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  if (corpus.documents.empty()) {
    std::cerr << "warning: corpus file '" << path << "' contains no documents\n";
  }
  return corpus;
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write corpus file: " + path);
  }
  for (const auto& doc : corpus.documents) {
    out << document_to_json(doc).dump() << "\n";
  }
}

FoldPlan kfold_split(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 3) {
    throw std::invalid_argument("kfold_split: k must be >= 3, got " + std::to_string(k));
  }
  if (corpus.documents.size() < k) {
    throw std::invalid_argument("kfold_split: k = " + std::to_string(k) +
                                " exceeds article count " +
                                std::to_string(corpus.documents.size()));
  }
  std::vector<std::string> ids;
  ids.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) {
    ids.push_back(d.doc_id);
  }
  Rng rng(seed);
  rng.shuffle(ids);
  FoldPlan plan;
  plan.k = k;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    plan.assignment[ids[i]] = i % k;
  }
  return plan;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.articles = corpus.documents.size();
  for (const auto& doc : corpus.documents) {
    if (!doc.gold_bias) {
      throw std::invalid_argument("corpus_stats: document '" + doc.doc_id +
                                  "' has no gold bias labels");
    }
    stats.sentences += doc.gold_bias->size();
    for (const int b : *doc.gold_bias) {
      stats.bias_sentences += b != 0 ? 1 : 0;
    }
  }
  stats.bias_ratio_percent =
      stats.sentences == 0
          ? 0.0
          : 100.0 * static_cast<double>(stats.bias_sentences) /
                static_cast<double>(stats.sentences);
  return stats;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
  json j;
  j["k"] = plan.k;
  json assign;
  for (const auto& [id, fold] : plan.assignment) {
    assign[id] = fold;
  }
  j["assignment"] = assign;
  return j.dump(2);
}

FoldPlan fold_plan_from_json(const std::string& text) {
  const json j = json::parse(text);
  FoldPlan plan;
  plan.k = j.at("k").get<std::size_t>();
  for (const auto& [id, fold] : j.at("assignment").items()) {
    plan.assignment[id] = fold.get<std::size_t>();
  }
  return plan;
}

}  // namespace erg::corpus
