#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lexfn {

/// Real vector: noun vectors, holistic phrase vectors, sentence vectors.
using Vector = std::vector<double>;

// Reductions run strictly left to right so results are reproducible.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);

/// Cosine similarity. A zero vector has cosine 0 with anything.
double cosine(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> values);

/// N x M matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);  // zeros
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Third-order tensor with dims (d1, d2, d3), last index fastest.
/// Verb tensors use (S, N, N).
class DenseTensor3 {
 public:
  explicit DenseTensor3(std::array<std::size_t, 3> dims);  // zeros
  DenseTensor3(std::array<std::size_t, 3> dims, std::vector<double> values);

  const std::array<std::size_t, 3>& dims() const noexcept { return dims_; }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return values_[(k * dims_[1] + i) * dims_[2] + j];
  }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const DenseTensor3&) const = default;

 private:
  std::array<std::size_t, 3> dims_;
  std::vector<double> values_;
};

/// A = sum_r U_r (x) V_r with U, V stored as R x N row-major factor matrices.
class LowRankMatrix {
 public:
  LowRankMatrix(std::size_t rank, std::size_t dim, std::vector<double> u_factors,
                std::vector<double> v_factors);

  std::size_t rank() const noexcept { return rank_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> u_factors() const noexcept { return u_; }
  std::span<const double> v_factors() const noexcept { return v_; }
  std::size_t parameter_count() const noexcept { return 2 * dim_ * rank_; }

  bool operator==(const LowRankMatrix&) const = default;

 private:
  std::size_t rank_;
  std::size_t dim_;
  std::vector<double> u_;
  std::vector<double> v_;
};

/// CP form V = sum_r P_r (x) Q_r (x) R_r; P is R x S, Q and R are R x N.
class LowRankTensor3 {
 public:
  LowRankTensor3(std::size_t rank, std::size_t sentence_dim, std::size_t noun_dim,
                 std::vector<double> p_factors, std::vector<double> q_factors,
                 std::vector<double> r_factors);

  std::size_t rank() const noexcept { return rank_; }
  std::size_t sentence_dim() const noexcept { return sentence_dim_; }
  std::size_t noun_dim() const noexcept { return noun_dim_; }
  std::span<const double> p_factors() const noexcept { return p_; }
  std::span<const double> q_factors() const noexcept { return q_; }
  std::span<const double> r_factors() const noexcept { return r_; }
  std::size_t parameter_count() const noexcept { return rank_ * (2 * noun_dim_ + sentence_dim_); }

  bool operator==(const LowRankTensor3&) const = default;

 private:
  std::size_t rank_;
  std::size_t sentence_dim_;
  std::size_t noun_dim_;
  std::vector<double> p_;
  std::vector<double> q_;
  std::vector<double> r_;
};

Vector matvec(const DenseMatrix& a, std::span<const double> n);
Vector bilinear_apply(const DenseTensor3& v, std::span<const double> s, std::span<const double> o);

/// U^T (V n), without forming the N x N matrix.
Vector lowrank_matrix_apply(const LowRankMatrix& m, std::span<const double> n);

/// P^T (Q s .* R o), without forming the S x N x N tensor.
Vector lowrank_tensor3_apply(const LowRankTensor3& t, std::span<const double> s,
                             std::span<const double> o);

DenseMatrix reconstruct_matrix(const LowRankMatrix& m);
DenseTensor3 reconstruct_tensor3(const LowRankTensor3& t);

double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_distance(const DenseTensor3& a, const DenseTensor3& b);
/// Sum of the per-factor distances (U and V compared separately).
double frobenius_distance(const LowRankMatrix& a, const LowRankMatrix& b);
/// Sum of the per-factor distances over P, Q and R.
double frobenius_distance(const LowRankTensor3& a, const LowRankTensor3& b);
/// Frobenius distance between two equally sized flat blocks.
double frobenius_distance(std::span<const double> a, std::span<const double> b);

Vector unfurl(const DenseMatrix& a);
Vector unfurl(const DenseTensor3& v);
Vector unfurl(const LowRankMatrix& m);
Vector unfurl(const LowRankTensor3& t);

namespace kernels {

// Raw kernels shared by the value types above and by the training code, which
// keeps parameters in flat blocks. Output spans are overwritten. None of them
// check sizes; the callers do.

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> n, std::span<double> out);

void bilinear(std::span<const double> v, std::size_t sdim, std::size_t ndim,
              std::span<const double> s, std::span<const double> o, std::span<double> out);

/// scratch must hold `rank` values and receives V n.
void lowrank_matrix(std::span<const double> u, std::span<const double> v, std::size_t rank,
                    std::size_t ndim, std::span<const double> n, std::span<double> scratch,
                    std::span<double> out);

/// qs and ro must hold `rank` values each and receive Q s and R o.
void lowrank_tensor3(std::span<const double> p, std::span<const double> q,
                     std::span<const double> r, std::size_t rank, std::size_t sdim,
                     std::size_t ndim, std::span<const double> s, std::span<const double> o,
                     std::span<double> qs, std::span<double> ro, std::span<double> out);

void reconstruct_lowrank_matrix(std::span<const double> u, std::span<const double> v,
                                std::size_t rank, std::size_t ndim, std::span<double> out);

void reconstruct_cp(std::span<const double> p, std::span<const double> q,
                    std::span<const double> r, std::size_t rank, std::size_t sdim,
                    std::size_t ndim, std::span<double> out);

}  // namespace kernels

}  // namespace lexfn
