#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "erg/corpus.hpp"

namespace erg::graph {

// ordered token-index pair (i, j) with i < j in text order
using PairKey = std::pair<std::size_t, std::size_t>;

inline constexpr const char* kHardeningRuleVersion = "argmax-lowest-index-v1";

// Per-token event probabilities and per-pair relation probability vectors.
// Category order matches the label layout used everywhere downstream:
//   event    (non_event, event)
//   coref    (non_corefer, corefer)
//   temporal (non, before, after, overlap)
//   causal   (non, causes, caused_by)
//   subevent (non, contains, contained_by)
struct SoftLabelTables {
  std::vector<std::array<double, 2>> event;
  std::map<PairKey, std::array<double, 2>> coref;
  std::map<PairKey, std::array<double, 4>> temporal;
  std::map<PairKey, std::array<double, 3>> causal;
  std::map<PairKey, std::array<double, 3>> subevent;

  // distributions sum to 1 within 1e-6, entries non-negative, pair keys are
  // text-ordered and reference identified event tokens only
  void validate() const;
  std::uint64_t checksum() const;
  std::vector<PairKey> pair_keys() const;  // the common key set, sorted
};

enum class RelationKind {
  coreference,
  before,
  after,
  overlap,
  causes,
  caused_by,
  contains,
  contained_by,
  event_sentence,
};

inline constexpr std::array<RelationKind, 8> kEventEventKinds = {
    RelationKind::coreference, RelationKind::before,   RelationKind::after,
    RelationKind::overlap,     RelationKind::causes,   RelationKind::caused_by,
    RelationKind::contains,    RelationKind::contained_by,
};

RelationKind inverse(RelationKind kind);
std::string_view to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(std::string_view name);

enum class TemporalLabel { non, before, after, overlap };
enum class CausalLabel { non, causes, caused_by };
enum class SubeventLabel { non, contains, contained_by };

struct HardLabels {
  std::vector<bool> event;  // per token
  std::map<PairKey, bool> coref;
  std::map<PairKey, TemporalLabel> temporal;
  std::map<PairKey, CausalLabel> causal;
  std::map<PairKey, SubeventLabel> subevent;
};

// token i is an event iff p_event > p_non_event; exact tie -> non-event
std::vector<std::size_t> identify_events(const SoftLabelTables& tables);

// all C(m, 2) pairs (i, j) with i < j in text order
std::vector<PairKey> form_pairs(const std::vector<std::size_t>& events);

// argmax per distribution; ties break toward the lowest index ("non" first)
HardLabels harden(const SoftLabelTables& tables);

struct GoldRelation {
  PairKey pair;
  RelationKind kind;
};

struct GoldRelationSet {
  std::vector<corpus::RelationAnnotation> raw;
  std::vector<GoldRelation> normalized;
};

// Source-scheme labels are mapped onto the eight event-event kinds with
// every stored pair in text order: the five fuzzy temporal labels merge into
// overlap, and directional labels flip (before<->after, causes<->caused_by,
// contains<->contained_by) when the annotated pair is against text order.
GoldRelationSet normalize_gold_relations(const std::vector<corpus::RelationAnnotation>& raw);

// view of normalized relations as raw annotations, for re-normalization
std::vector<corpus::RelationAnnotation> to_raw(const std::vector<GoldRelation>& normalized);

struct EventNode {
  std::size_t token = 0;
  std::size_t sentence = 0;
};

// event-event edge between event-node indices; source precedes target in text
struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  RelationKind kind = RelationKind::coreference;
};

struct EventRelationGraph {
  std::string doc_id;
  std::vector<EventNode> event_nodes;  // ordered by trigger token
  std::size_t sentence_count = 0;
  std::vector<Edge> edges;  // event-event only; the event-sentence link of
                            // node i is (i, event_nodes[i].sentence)
  std::string table_checksum;
  std::string hardening_rule;

  // neighbors of event i under kind r, traversing stored edges both ways
  // (a stored edge (a, b, r) is seen from b as kind inverse(r))
  std::vector<std::size_t> neighbors(std::size_t event_index, RelationKind kind) const;
  std::vector<std::size_t> events_in_sentence(std::size_t sentence) const;
  void drop_event_event_edges() { edges.clear(); }
};

EventRelationGraph assemble_graph(const corpus::Document& doc, const HardLabels& labels);

// connected components under coreference edges; singletons included;
// clusters sorted by smallest member, members sorted
std::vector<std::vector<std::size_t>> coref_clusters(const EventRelationGraph& graph);

std::string graph_to_json(const EventRelationGraph& graph);
EventRelationGraph graph_from_json(const std::string& text);

// soft-table container file: one table set per doc_id
std::map<std::string, SoftLabelTables> load_tables(const std::string& path);
void save_tables(const std::string& path, const std::map<std::string, SoftLabelTables>& tables);

}  // namespace erg::graph
