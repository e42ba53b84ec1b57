#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexfn/embeddings.hpp"

namespace lexfn {

enum class PartOfSpeech { adjective, verb, noun };

std::string_view to_string(PartOfSpeech pos);

struct WordId {
  std::string surface;
  PartOfSpeech pos = PartOfSpeech::adjective;

  auto operator<=>(const WordId&) const = default;
};

/// Symmetric pairwise scores, e.g. from a thesaurus or an ontology.
class PrecomputedScores {
 public:
  void set(const std::string& a, const std::string& b, double score);
  bool knows(std::string_view word) const { return words_.find(word) != words_.end(); }
  /// -inf when the pair was never listed.
  double score(std::string_view a, std::string_view b) const;

 private:
  std::map<std::pair<std::string, std::string>, double> scores_;
  std::map<std::string, bool, std::less<>> words_;
};

/// Where the word-word similarity values come from. Embedding vectors here
/// need not be the ones used for training.
class SimilaritySource {
 public:
  enum class Kind { embedding_cosine, precomputed_matrix };

  static SimilaritySource from_embeddings(EmbeddingTable table);
  static SimilaritySource from_scores(PrecomputedScores scores);

  Kind kind() const noexcept { return kind_; }
  bool knows(std::string_view word) const;
  const EmbeddingTable* embeddings() const { return embeddings_.get(); }

 private:
  friend double phi(const SimilaritySource& src, const WordId& w1, const WordId& w2);

  Kind kind_ = Kind::embedding_cosine;
  std::shared_ptr<const EmbeddingTable> embeddings_;
  std::shared_ptr<const PrecomputedScores> scores_;
};

/// Similarity of two words. Throws MissingWord for words the source lacks.
double phi(const SimilaritySource& src, const WordId& w1, const WordId& w2);

struct Neighbor {
  std::string word;
  double phi = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Frozen top-K neighbor lists, one per word, weights non-increasing.
struct NeighborGraph {
  std::size_t k = 0;
  PartOfSpeech pos = PartOfSpeech::adjective;
  std::map<std::string, std::vector<Neighbor>, std::less<>> entries;

  /// Empty list for words without an entry.
  const std::vector<Neighbor>& neighbors_of(std::string_view word) const;

  bool operator==(const NeighborGraph&) const = default;
};

struct GraphOptions {
  bool clamp_phi_nonnegative = false;
};

/// For every word, its k most similar other words. Ties go to the
/// lexicographically smaller surface form; pairs scored -inf are never chosen.
NeighborGraph build_graph(const SimilaritySource& src, const std::vector<WordId>& vocab,
                          std::size_t k, const GraphOptions& options = {});

/// `word TAB neighbor TAB phi`, sorted by word then rank.
std::string format_graph(const NeighborGraph& graph);
void save_graph(const NeighborGraph& graph, const std::string& path);
NeighborGraph load_graph(const std::string& path, PartOfSpeech pos);

/// `word1 TAB word2 TAB score` lines.
PrecomputedScores load_scores(const std::string& path);

}  // namespace lexfn
