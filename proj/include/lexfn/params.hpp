#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexfn/tensor.hpp"

namespace lexfn {

enum class WordKind { adjective, verb };
enum class Representation { full, lowrank };

std::string_view to_string(WordKind kind);
std::string_view to_string(Representation rep);
WordKind parse_word_kind(std::string_view text);
Representation parse_representation(std::string_view text);

/// Shape of one word's parameters. Parameters are kept as a flat array made of
/// consecutive blocks:
///   full adjective   [A (N x N)]
///   full verb        [V (S x N x N)]
///   low-rank adj     [U (R x N), V (R x N)]
///   low-rank verb    [P (R x S), Q (R x N), R (R x N)]
/// Low-rank sharing and fitting operate block by block.
struct Shape {
  WordKind kind = WordKind::adjective;
  Representation rep = Representation::full;
  std::size_t noun_dim = 0;
  std::size_t sentence_dim = 0;  // verbs only; adjectives output N
  std::size_t rank = 0;          // low-rank only

  static Shape full_adjective(std::size_t n) { return {WordKind::adjective, Representation::full, n, 0, 0}; }
  static Shape full_verb(std::size_t s, std::size_t n) { return {WordKind::verb, Representation::full, n, s, 0}; }
  static Shape lowrank_adjective(std::size_t n, std::size_t r) {
    return {WordKind::adjective, Representation::lowrank, n, 0, r};
  }
  static Shape lowrank_verb(std::size_t s, std::size_t n, std::size_t r) {
    return {WordKind::verb, Representation::lowrank, n, s, r};
  }

  void validate() const;

  std::size_t num_blocks() const;
  std::size_t block_size(std::size_t block) const;
  std::size_t block_offset(std::size_t block) const;
  std::size_t size() const;
  std::size_t output_dim() const { return kind == WordKind::adjective ? noun_dim : sentence_dim; }
  std::size_t num_args() const { return kind == WordKind::adjective ? 1 : 2; }
  /// Length of the unfurled (dense) tensor.
  std::size_t dense_size() const;

  bool operator==(const Shape&) const = default;
};

/// One word's trainable parameters.
class Params {
 public:
  explicit Params(Shape shape);  // zeros
  Params(Shape shape, std::vector<double> values);

  static Params from(const DenseMatrix& a);
  static Params from(const DenseTensor3& v);
  static Params from(const LowRankMatrix& m);
  static Params from(const LowRankTensor3& t);

  const Shape& shape() const noexcept { return shape_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> block(std::size_t b) const;
  std::span<double> block(std::size_t b);

  /// Composition: A n for adjectives, contraction with (s, o) for verbs.
  /// Low-rank forms use the factored action.
  Vector apply(std::span<const double> arg0, std::span<const double> arg1 = {}) const;

  /// Dense flattening in canonical order; low-rank forms are reconstructed.
  Vector unfurl() const;

  DenseMatrix to_dense_matrix() const;
  DenseTensor3 to_dense_tensor3() const;
  LowRankMatrix to_lowrank_matrix() const;
  LowRankTensor3 to_lowrank_tensor3() const;

  bool operator==(const Params&) const = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

/// Parameters for a vocabulary of one word kind, ordered by surface form.
class ParamsStore {
 public:
  ParamsStore() = default;
  /// Duplicates are dropped; every word starts with zero parameters.
  ParamsStore(Shape shape, std::vector<std::string> words);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(std::size_t i) const { return words_[i]; }

  bool contains(std::string_view word) const;
  /// Throws MissingWord.
  std::size_t index_of(std::string_view word) const;

  Params& operator[](std::size_t i) { return params_[i]; }
  const Params& operator[](std::size_t i) const { return params_[i]; }
  Params& at(std::string_view word) { return params_[index_of(word)]; }
  const Params& at(std::string_view word) const { return params_[index_of(word)]; }

  bool operator==(const ParamsStore&) const = default;

 private:
  Shape shape_;
  std::vector<std::string> words_;
  std::vector<Params> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Largest absolute entry; tiny values make unfurled cosines unreliable.
double max_abs_entry(const Params& params);

}  // namespace lexfn
