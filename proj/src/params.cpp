#include "lexfn/params.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lexfn/error.hpp"

namespace lexfn {

std::string_view to_string(WordKind kind) {
  return kind == WordKind::adjective ? "adjective" : "verb";
}

std::string_view to_string(Representation rep) {
  return rep == Representation::full ? "full" : "lowrank";
}

WordKind parse_word_kind(std::string_view text) {
  if (text == "adjective") return WordKind::adjective;
  if (text == "verb") return WordKind::verb;
  throw RejectedInput(fmt::format("unknown word type '{}'", text));
}

Representation parse_representation(std::string_view text) {
  if (text == "full") return Representation::full;
  if (text == "lowrank") return Representation::lowrank;
  throw RejectedInput(fmt::format("unknown representation '{}'", text));
}

void Shape::validate() const {
  if (noun_dim == 0) throw RejectedInput("noun dimension must be positive");
  if (kind == WordKind::verb && sentence_dim == 0) {
    throw RejectedInput("sentence dimension must be positive for verbs");
  }
  if (rep == Representation::lowrank && rank == 0) {
    throw RejectedInput("low-rank representation needs rank >= 1");
  }
}

std::size_t Shape::num_blocks() const {
  if (rep == Representation::full) return 1;
  return kind == WordKind::adjective ? 2 : 3;
}

std::size_t Shape::block_size(std::size_t block) const {
  if (rep == Representation::full) {
    return kind == WordKind::adjective ? noun_dim * noun_dim : sentence_dim * noun_dim * noun_dim;
  }
  if (kind == WordKind::verb && block == 0) return rank * sentence_dim;
  return rank * noun_dim;
}

std::size_t Shape::block_offset(std::size_t block) const {
  std::size_t offset = 0;
  for (std::size_t b = 0; b < block; ++b) offset += block_size(b);
  return offset;
}

std::size_t Shape::size() const { return block_offset(num_blocks()); }

std::size_t Shape::dense_size() const {
  return kind == WordKind::adjective ? noun_dim * noun_dim : sentence_dim * noun_dim * noun_dim;
}

Params::Params(Shape shape) : shape_(shape) {
  shape_.validate();
  values_.assign(shape_.size(), 0.0);
}

Params::Params(Shape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
  shape_.validate();
  if (values_.size() != shape_.size()) {
    throw RejectedInput(
        fmt::format("parameter array has {} values, shape needs {}", values_.size(), shape_.size()));
  }
  if (!all_finite(values_)) throw RejectedInput("parameters contain non-finite entries");
}

Params Params::from(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw RejectedInput("adjective matrices must be square");
  return Params(Shape::full_adjective(a.rows()), {a.values().begin(), a.values().end()});
}

Params Params::from(const DenseTensor3& v) {
  const auto& d = v.dims();
  if (d[1] != d[2]) throw RejectedInput("verb tensors must have shape (S, N, N)");
  return Params(Shape::full_verb(d[0], d[1]), {v.values().begin(), v.values().end()});
}

Params Params::from(const LowRankMatrix& m) {
  std::vector<double> values(m.u_factors().begin(), m.u_factors().end());
  values.insert(values.end(), m.v_factors().begin(), m.v_factors().end());
  return Params(Shape::lowrank_adjective(m.dim(), m.rank()), std::move(values));
}

Params Params::from(const LowRankTensor3& t) {
  std::vector<double> values(t.p_factors().begin(), t.p_factors().end());
  values.insert(values.end(), t.q_factors().begin(), t.q_factors().end());
  values.insert(values.end(), t.r_factors().begin(), t.r_factors().end());
  return Params(Shape::lowrank_verb(t.sentence_dim(), t.noun_dim(), t.rank()), std::move(values));
}

std::span<const double> Params::block(std::size_t b) const {
  return std::span<const double>(values_).subspan(shape_.block_offset(b), shape_.block_size(b));
}

std::span<double> Params::block(std::size_t b) {
  return std::span<double>(values_).subspan(shape_.block_offset(b), shape_.block_size(b));
}

Vector Params::apply(std::span<const double> arg0, std::span<const double> arg1) const {
  const std::size_t n = shape_.noun_dim;
  if (arg0.size() != n || (shape_.kind == WordKind::verb && arg1.size() != n)) {
    throw RejectedInput(fmt::format("argument vectors do not match noun dimension {}", n));
  }
  Vector out(shape_.output_dim());
  if (shape_.rep == Representation::full) {
    if (shape_.kind == WordKind::adjective) {
      kernels::matvec(values_, n, n, arg0, out);
    } else {
      kernels::bilinear(values_, shape_.sentence_dim, n, arg0, arg1, out);
    }
    return out;
  }
  if (shape_.kind == WordKind::adjective) {
    Vector scratch(shape_.rank);
    kernels::lowrank_matrix(block(0), block(1), shape_.rank, n, arg0, scratch, out);
  } else {
    Vector qs(shape_.rank), ro(shape_.rank);
    kernels::lowrank_tensor3(block(0), block(1), block(2), shape_.rank, shape_.sentence_dim, n,
                             arg0, arg1, qs, ro, out);
  }
  return out;
}

Vector Params::unfurl() const {
  if (shape_.rep == Representation::full) return values_;
  Vector out(shape_.dense_size());
  if (shape_.kind == WordKind::adjective) {
    kernels::reconstruct_lowrank_matrix(block(0), block(1), shape_.rank, shape_.noun_dim, out);
  } else {
    kernels::reconstruct_cp(block(0), block(1), block(2), shape_.rank, shape_.sentence_dim,
                            shape_.noun_dim, out);
  }
  return out;
}

DenseMatrix Params::to_dense_matrix() const {
  if (shape_.kind != WordKind::adjective) throw RejectedInput("verb parameters are not a matrix");
  return DenseMatrix(shape_.noun_dim, shape_.noun_dim, unfurl());
}

DenseTensor3 Params::to_dense_tensor3() const {
  if (shape_.kind != WordKind::verb) throw RejectedInput("adjective parameters are not a 3-tensor");
  return DenseTensor3({shape_.sentence_dim, shape_.noun_dim, shape_.noun_dim}, unfurl());
}

LowRankMatrix Params::to_lowrank_matrix() const {
  if (shape_.kind != WordKind::adjective || shape_.rep != Representation::lowrank) {
    throw RejectedInput("parameters are not a low-rank matrix");
  }
  auto u = block(0);
  auto v = block(1);
  return LowRankMatrix(shape_.rank, shape_.noun_dim, {u.begin(), u.end()}, {v.begin(), v.end()});
}

LowRankTensor3 Params::to_lowrank_tensor3() const {
  if (shape_.kind != WordKind::verb || shape_.rep != Representation::lowrank) {
    throw RejectedInput("parameters are not a low-rank tensor");
  }
  auto p = block(0);
  auto q = block(1);
  auto r = block(2);
  return LowRankTensor3(shape_.rank, shape_.sentence_dim, shape_.noun_dim, {p.begin(), p.end()},
                        {q.begin(), q.end()}, {r.begin(), r.end()});
}

ParamsStore::ParamsStore(Shape shape, std::vector<std::string> words) : shape_(shape) {
  shape_.validate();
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  words_ = std::move(words);
  params_.assign(words_.size(), Params(shape_));
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

bool ParamsStore::contains(std::string_view word) const { return index_.find(word) != index_.end(); }

std::size_t ParamsStore::index_of(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) throw MissingWord(std::string(word), "not in parameter store");
  return it->second;
}

double max_abs_entry(const Params& params) {
  double m = 0.0;
  for (double x : params.values()) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace lexfn
