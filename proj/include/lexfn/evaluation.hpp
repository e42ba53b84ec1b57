#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexfn/data_io.hpp"
#include "lexfn/embeddings.hpp"
#include "lexfn/neighbors.hpp"
#include "lexfn/objectives.hpp"
#include "lexfn/params.hpp"

namespace lexfn {

/// compose: cosine of the composed phrase vectors. unfurl: cosine of the
/// flattened word tensors (word pairs). additive: cosine of the summed word
/// vectors of each side, no model involved.
enum class ScoreMode { compose, unfurl, additive };

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view text);

enum class PValueMethod { permutation, t_approx };

struct SpearmanOptions {
  PValueMethod method = PValueMethod::permutation;
  std::size_t permutations = 10000;
  std::uint64_t seed = 0;
};

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
};

/// 1-based ranks, ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson correlation of the average ranks. Two-sided p-value from seeded
/// permutations of ys, (1 + hits) / (1 + permutations), or from the t
/// distribution with n - 2 degrees of freedom. Throws UndefinedCorrelation for
/// fewer than 3 points or a constant input.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys,
                        const SpearmanOptions& options = {});

/// Cosine between the two sides of an item under a trained model. `nouns`
/// holds the argument vectors (compose mode). Throws MissingWord.
double model_score(const ParamsStore& store, const EmbeddingTable& nouns, const EvalItem& item,
                   ScoreMode mode);

/// Cosine of the per-side sums of word vectors. Throws MissingWord.
double additive_score(const EmbeddingTable& vectors, const EvalItem& item);

struct ScoredItem {
  std::size_t item_id = 0;  // position in the dataset
  EvalItem item;
  double model_score = 0.0;
};

struct ScoredDataset {
  std::vector<ScoredItem> items;
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t dropped = 0;
};

/// Scores every item with `scorer`; items it rejects with MissingWord are dropped
/// and counted. Throws EmptyEvaluation when nothing is left.
ScoredDataset score_items(std::span<const EvalItem> items,
                          const std::function<double(const EvalItem&)>& scorer,
                          const SpearmanOptions& options = {});

/// score_items with model_score (or additive_score on `nouns` for additive mode).
ScoredDataset score_dataset(const ParamsStore& store, const EmbeddingTable& nouns,
                            std::span<const EvalItem> items, ScoreMode mode,
                            const SpearmanOptions& options = {});

/// `dataset TAB mode TAB n TAB dropped TAB rho TAB p_value`.
std::string format_report_line(std::string_view dataset, ScoreMode mode, const ScoredDataset& scored);
/// `item_id,model_score,gold_score` with a header line.
std::string format_item_csv(const ScoredDataset& scored);

struct ScoredWord {
  std::string word;
  double score = 0.0;

  bool operator==(const ScoredWord&) const = default;
};

/// The top_n other stored words ranked by cosine of unfurled tensors, ties in
/// lexicographic order. Throws MissingWord.
std::vector<ScoredWord> nearest_neighbors(const ParamsStore& store, std::string_view word,
                                          std::size_t top_n);

/// `word TAB max_abs_entry` for every stored word.
std::string format_tensor_diagnostics(const ParamsStore& store);

/// Each word's tensor replaced by its sharing mixture with its stored neighbors.
ParamsStore mixture_store(const ParamsStore& store, const NeighborGraph& graph, double alpha,
                          const ObjectiveConfig& config);

}  // namespace lexfn
