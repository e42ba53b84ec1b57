#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lexfn/neighbors.hpp"
#include "lexfn/params.hpp"

namespace lexfn {

struct ObjectiveConfig {
  double alpha = 0.0;      // parameter-sharing mix, [0, 1]
  double beta = 0.0;       // fitting strength, >= 0
  std::size_t k = 1;       // neighbors used, also the default divisor
  double l2_lambda = 0.0;  // only applied to full tensors
  Representation representation = Representation::full;
  /// Divide by the number of neighbors actually present instead of k.
  bool divide_by_actual_neighbors = false;

  void validate() const;
  /// Divisor for the neighbor sums given how many neighbors a word has.
  double divisor(std::size_t actual_neighbors) const;
};

/// Training examples of one word with argument and target vectors copied
/// into contiguous storage.
class ExampleBatch {
 public:
  ExampleBatch() = default;
  ExampleBatch(std::size_t noun_dim, std::size_t output_dim, std::size_t num_args);

  /// arg1 is ignored (and may be empty) for single-argument batches.
  void add(std::span<const double> arg0, std::span<const double> arg1,
           std::span<const double> target);

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::size_t noun_dim() const noexcept { return noun_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t num_args() const noexcept { return num_args_; }

  std::span<const double> arg0(std::size_t i) const;
  std::span<const double> arg1(std::size_t i) const;
  std::span<const double> target(std::size_t i) const;

  /// Examples [begin, end) as a new batch.
  ExampleBatch slice(std::size_t begin, std::size_t end) const;

 private:
  std::size_t noun_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::size_t num_args_ = 1;
  std::size_t count_ = 0;
  std::vector<double> args0_;
  std::vector<double> args1_;
  std::vector<double> targets_;
};

struct WeightedParams {
  const Params* params = nullptr;
  double phi = 0.0;
};

/// 1/2 ||A n - z||^2.
double adj_example_loss(const Params& a, std::span<const double> n, std::span<const double> z);
/// 1/2 ||V(s, o) - z||^2.
double verb_example_loss(const Params& v, std::span<const double> s, std::span<const double> o,
                         std::span<const double> z);
/// Unsquared residual norm ||T(args) - z||, for diagnostics.
double residual_norm(const Params& t, std::span<const double> arg0, std::span<const double> arg1,
                     std::span<const double> z);

/// (1 - alpha) T + (alpha / k) sum_i phi_i T_i, factor by factor for low-rank
/// parameters (component r of one word lines up with component r of another).
Params ps_effective_params(const Params& self, std::span<const WeightedParams> neighbors,
                           double alpha, double k);

/// 1/2 ||ps_effective_params(...) applied to args - z||^2.
double ps_example_loss(const Params& self, std::span<const WeightedParams> neighbors, double alpha,
                       double k, std::span<const double> arg0, std::span<const double> arg1,
                       std::span<const double> z);

/// (beta / k) sum_i phi_i ||T - T_i||_F, summed over factor matrices for
/// low-rank parameters. Exactly 0 when beta is 0.
double ft_penalty(const Params& self, std::span<const WeightedParams> neighbors, double beta,
                  double k);

/// Mean parameter-sharing loss over the batch, plus the fitting penalty, plus
/// l2 (full tensors, non-empty batch). An empty batch is legal only with
/// beta > 0 and then yields the fitting penalty alone.
double combined_loss(const Params& self, const ExampleBatch& batch,
                     std::span<const WeightedParams> neighbors, const ObjectiveConfig& config);

struct IndexedNeighbor {
  std::size_t index = 0;
  double phi = 0.0;
};

/// Neighbor lists keyed by store index. Throws MissingWord for neighbors the
/// store does not hold.
using IndexedGraph = std::vector<std::vector<IndexedNeighbor>>;
IndexedGraph index_graph(const NeighborGraph& graph, const ParamsStore& store);

/// What a word contributes to the global objective.
struct WordObjective {
  const ExampleBatch* batch = nullptr;  // null or empty: no data this step
  double alpha = 0.0;
};

struct GradientSet {
  std::vector<std::vector<double>> grads;  // by store index, shaped like the parameters
  std::vector<double> word_loss;           // combined_loss of each word (0 if it has no terms)
  double total = 0.0;
};

/// The global objective is the sum of combined_loss over every word that has
/// data or, with beta > 0, neighbors to fit. Its exact gradient reaches each
/// word through its own terms and through every word that lists it as a
/// neighbor. Accumulation order is fixed, so results do not depend on
/// `threads`.
GradientSet gradients(const ParamsStore& store, std::span<const WordObjective> terms,
                      const IndexedGraph& graph, const ObjectiveConfig& config,
                      std::size_t threads = 1);

/// combined_loss of every word as in gradients(), without the gradient.
std::vector<double> word_losses(const ParamsStore& store, std::span<const WordObjective> terms,
                                const IndexedGraph& graph, const ObjectiveConfig& config,
                                std::size_t threads = 1);

/// Sum of combined_loss terms as in gradients(), without the gradient.
double total_objective(const ParamsStore& store, std::span<const WordObjective> terms,
                       const IndexedGraph& graph, const ObjectiveConfig& config);

}  // namespace lexfn
