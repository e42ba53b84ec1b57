#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexfn/config.hpp"
#include "lexfn/data_io.hpp"
#include "lexfn/embeddings.hpp"
#include "lexfn/tensor.hpp"

namespace lexfn {

/// Generalised lexical function: a (N, N, D) tensor that maps a D-dimensional
/// adjective word vector to an N x N adjective matrix. Last index fastest.
class GlfTensor {
 public:
  GlfTensor(std::size_t noun_dim, std::size_t vector_dim);  // zeros
  GlfTensor(std::size_t noun_dim, std::size_t vector_dim, std::vector<double> values);

  std::size_t noun_dim() const noexcept { return noun_dim_; }
  std::size_t vector_dim() const noexcept { return vector_dim_; }
  std::array<std::size_t, 3> dims() const { return {noun_dim_, noun_dim_, vector_dim_}; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j, std::size_t d) const {
    return values_[(i * noun_dim_ + j) * vector_dim_ + d];
  }

  bool operator==(const GlfTensor&) const = default;

 private:
  std::size_t noun_dim_;
  std::size_t vector_dim_;
  std::vector<double> values_;
};

/// M[i, j] = sum_d G[i, j, d] a[d].
DenseMatrix glf_predict(const GlfTensor& g, std::span<const double> a);

struct GlfExample {
  Vector word_vector;
  DenseMatrix matrix;
};

/// Mean over examples of 1/2 ||G a_j - A_j||_F^2; fills `grad` (sized like G)
/// when given.
double glf_objective(const GlfTensor& g, std::span<const GlfExample> examples,
                     std::vector<double>* grad = nullptr);

struct GlfFit {
  GlfTensor tensor;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  bool stagnated = false;
};

/// Fits G to pretrained adjective matrices with ADADELTA, using the batch
/// size, iteration cap, stagnation rule and seed of `config`.
GlfFit glf_train(const std::map<std::string, DenseMatrix>& pretrained,
                 const EmbeddingTable& adj_vectors, const TrainConfig& config);

/// Plain lexical-function matrices (no sharing, no fitting) for adjectives with
/// at least `min_tuples` tuples.
std::map<std::string, DenseMatrix> glf_pretrain(const TuplesByWord& tuples,
                                                const EmbeddingTable& nouns,
                                                const EmbeddingTable& holistic,
                                                std::size_t min_tuples, const TrainConfig& config);

inline constexpr std::size_t kGlfMinTuples = 50;
/// One example per adjective, so far fewer examples than in word training.
inline constexpr std::size_t kGlfBatchSize = 10;

}  // namespace lexfn
