#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "lexfn/tensor.hpp"

namespace lexfn {

/// Keyed vectors of a common dimensionality (noun vectors, holistic phrase
/// vectors, or word vectors used for similarity).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  /// The first insert fixes the dimension of an empty table.
  /// Throws RejectedInput on a duplicate key or a dimension mismatch.
  void insert(std::string key, Vector vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }
  const Vector* find(std::string_view key) const;
  /// Throws MissingWord.
  const Vector& at(std::string_view key) const;
  const std::map<std::string, Vector, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, Vector, std::less<>> entries_;
};

}  // namespace lexfn
