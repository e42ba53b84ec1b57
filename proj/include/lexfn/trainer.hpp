#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexfn/config.hpp"
#include "lexfn/data_io.hpp"
#include "lexfn/neighbors.hpp"
#include "lexfn/objectives.hpp"
#include "lexfn/params.hpp"

namespace lexfn {

enum class StopReason { max_iters, stagnation, error_increase, validation_increase };

std::string_view to_string(StopReason reason);

struct WordReport {
  std::string word;
  std::size_t tuples = 0;  // training tuples after the validation split
  double final_train_loss = 0.0;
  std::optional<double> final_val_loss;
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::max_iters;
  std::vector<double> train_loss_history;  // one value per epoch
};

struct TrainReport {
  std::vector<WordReport> words;  // ordered like the parameter store

  const WordReport& at(std::string_view word) const;
  /// `word TAB final_train_loss TAB val_loss_or_dash TAB iterations TAB stop_reason`.
  std::string format() const;
};

struct FitResult {
  ParamsStore params;
  TrainReport report;
};

/// Seed derived from the global seed and a word, independent of vocabulary order.
std::uint64_t word_seed(std::uint64_t seed, std::string_view word, std::string_view salt = {});

/// Entries uniform on (-s, s), s = 1/sqrt(fan-in): N for dense tensors and for
/// the V, Q, R factors; the rank for U and P. Each word draws from its own
/// word_seed stream.
ParamsStore initialize_store(const Shape& shape, const std::vector<std::string>& vocab,
                             std::uint64_t seed);

/// Seeded uniform split with ceil(fraction * m) validation tuples once there
/// are at least `min_points`; below that the validation set is empty. Both
/// halves keep the input order.
std::pair<std::vector<TrainingTuple>, std::vector<TrainingTuple>> split_validation(
    const std::vector<TrainingTuple>& tuples, double fraction, std::size_t min_points,
    std::uint64_t seed);

/// Keeps ceil(percent/100 * m) tuples of every word (at least one if it had any).
TuplesByWord ablate_tuples(const TuplesByWord& tuples, double percent, std::uint64_t seed);

/// Keeps all tuples of ceil(percent/100 * W) of the W words that have data and
/// drops the rest.
TuplesByWord ablate_words(const TuplesByWord& tuples, double percent, std::uint64_t seed);

/// Argument and holistic vectors of each tuple. Throws MissingWord.
ExampleBatch resolve_batch(const std::vector<TrainingTuple>& tuples, const Shape& shape,
                           const EmbeddingTable& nouns, const EmbeddingTable& holistic);

/// Trains every word of `vocab` (words heading tuples are added to it).
/// Words with no tuples still move through the neighbor terms of the
/// objective. Each epoch takes synchronous ADADELTA steps against a snapshot of
/// all parameters; a word stops on stagnation, a sustained rise of its
/// training loss (adjectives) or of its validation loss, or at the iteration
/// cap. Words without data run to the cap.
FitResult fit(const std::vector<std::string>& vocab, const TuplesByWord& tuples,
              const NeighborGraph& graph, const EmbeddingTable& nouns,
              const EmbeddingTable& holistic, const Shape& shape, const TrainConfig& config);

/// Same, starting from the given parameters instead of a fresh initialization.
FitResult fit_from(ParamsStore initial, const TuplesByWord& tuples, const NeighborGraph& graph,
                   const EmbeddingTable& nouns, const EmbeddingTable& holistic,
                   const TrainConfig& config);

}  // namespace lexfn
