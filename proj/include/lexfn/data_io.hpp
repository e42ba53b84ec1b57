#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexfn/embeddings.hpp"
#include "lexfn/params.hpp"

namespace lexfn {

/// `key v1 v2 ... vD` per line, single spaces.
EmbeddingTable load_embeddings(const std::string& path);
std::string format_embeddings(const EmbeddingTable& table);
void save_embeddings(const EmbeddingTable& table, const std::string& path);

/// One training example: the head word, its argument nouns (one for
/// adjectives, subject and object for verbs) and the key of the phrase vector.
struct TrainingTuple {
  std::string head;
  std::vector<std::string> args;
  std::string holistic_key;
  std::uint64_t occurrence_count = 1;

  bool operator==(const TrainingTuple&) const = default;
};

using TuplesByWord = std::map<std::string, std::vector<TrainingTuple>>;

/// Lowercased, words joined by '_' ("Red Car" -> "red_car").
std::string normalize_key(std::string_view key);

/// `key TAB count`, for nouns and phrases alike.
using CorpusCounts = std::map<std::string, std::uint64_t, std::less<>>;
CorpusCounts load_counts(const std::string& path);

struct TupleFilter {
  std::uint64_t p_min = 2;    // phrase occurrences
  std::uint64_t q_min = 100;  // occurrences of every argument noun
  std::size_t cap = 500;      // tuples kept per head word
};

/// Parses a tuple file and applies the filter. Adjective lines are
/// `adjective TAB noun TAB key TAB count`; verb lines are
/// `subject TAB verb TAB object TAB key TAB count`. Nouns missing from the
/// counts are filtered out with a warning on `warnings` (if given). Kept tuples
/// are ordered by descending count, then key, then arguments. With `holistic`
/// given, every kept key must resolve there (MissingWord otherwise).
TuplesByWord load_tuples(const std::string& path, WordKind kind, const CorpusCounts& counts,
                         const TupleFilter& filter = {}, const EmbeddingTable* holistic = nullptr,
                         std::vector<std::string>* warnings = nullptr);

/// The filtering step of load_tuples on already parsed tuples.
TuplesByWord filter_tuples(const TuplesByWord& tuples, const CorpusCounts& counts,
                           const TupleFilter& filter, std::vector<std::string>* warnings = nullptr);

std::string format_tuples(const TuplesByWord& tuples, WordKind kind);

enum class EvalShape { word_pair, an_pair, svo_pair };

std::string_view to_string(EvalShape shape);
EvalShape parse_eval_shape(std::string_view text);
std::size_t words_per_side(EvalShape shape);

/// A rated pair. Sides hold 1 word (word pair), adjective and noun (AN), or
/// subject, verb and object (SVO).
struct EvalItem {
  EvalShape shape = EvalShape::word_pair;
  std::vector<std::string> left;
  std::vector<std::string> right;
  double gold_score = 0.0;
};

/// Whitespace separated fields, the last being the gold score.
std::vector<EvalItem> load_eval_dataset(const std::string& path, EvalShape shape);
/// Shape taken from the field count of the first line (3, 5 or 7).
EvalShape detect_eval_shape(const std::string& path);

}  // namespace lexfn
