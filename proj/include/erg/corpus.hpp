#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erg::corpus {

// half-open token interval [begin, end)
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// One annotated event pair as it arrives from the source scheme; the family
// disambiguates labels like "contains" that exist in two schemes.
struct RelationAnnotation {
  std::size_t first = 0;   // token index of the first endpoint as annotated
  std::size_t second = 0;  // token index of the second endpoint as annotated
  std::string family;      // coreference | temporal | causal | subevent
  std::string label;
};

struct BasilSentenceAnnotation {
  bool lexical = false;
  bool informational = false;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<SentenceSpan> sentences;
  std::optional<std::vector<int>> gold_bias;  // 0/1 per sentence
  std::optional<std::vector<std::size_t>> gold_events;
  std::optional<std::vector<RelationAnnotation>> gold_relations;
  std::optional<std::vector<BasilSentenceAnnotation>> basil;
  std::optional<std::vector<std::array<int, 5>>> biasedsents;

  std::size_t token_count() const { return tokens.size(); }
  std::size_t sentence_count() const { return sentences.size(); }
  // throws when the token lies outside every sentence span
  std::size_t sentence_of_token(std::size_t token) const;

  void validate() const;  // checks every Document invariant
};

struct Corpus {
  std::string name;
  std::vector<Document> documents;

  const Document* find(const std::string& doc_id) const;
};

struct FoldPlan {
  std::size_t k = 0;
  std::map<std::string, std::size_t> assignment;  // doc_id -> fold in [0, k)
};

int binarize_basil(bool lexical, bool informational);

// Scores are binarized first (1,2 -> non-bias; 3,4 -> bias), then majority
// voted; five voters guarantee no tie.
int binarize_biasedsents(const std::array<int, 5>& scales);

// Fills gold_bias from the raw BASIL or BiasedSents annotations when absent.
void derive_bias_labels(Document& doc);

// JSON Lines, one document per line; validates all invariants and derives
// gold_bias from raw annotations when possible. Errors name the line number
// and the offending field. An empty file yields an empty corpus plus a
// warning on stderr.
Corpus load_corpus(const std::string& path);
void save_corpus(const std::string& path, const Corpus& corpus);

FoldPlan kfold_split(const Corpus& corpus, std::size_t k, std::uint64_t seed);

struct CorpusStats {
  std::size_t articles = 0;
  std::size_t sentences = 0;
  std::size_t bias_sentences = 0;
  double bias_ratio_percent = 0.0;
};

CorpusStats corpus_stats(const Corpus& corpus);

std::string fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const std::string& text);

}  // namespace erg::corpus
