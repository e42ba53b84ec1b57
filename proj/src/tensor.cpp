#include "lexfn/tensor.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lexfn/error.hpp"

namespace lexfn {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  if (!all_finite(values)) throw RejectedInput(fmt::format("{} contains non-finite entries", what));
}

void require_length(std::span<const double> v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw RejectedInput(fmt::format("{} has length {}, expected {}", what, v.size(), expected));
  }
}

void require_size(const std::vector<double>& values, std::size_t expected, const char* what) {
  if (values.size() != expected) {
    throw RejectedInput(fmt::format("{} holds {} values, expected {}", what, values.size(), expected));
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw RejectedInput(fmt::format("dot product of lengths {} and {}", a.size(), b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> a) {
  double acc = 0.0;
  for (double x : a) acc += x * x;
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw RejectedInput(fmt::format("cosine of lengths {} and {}", a.size(), b.size()));
  }
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot(a, b) / (na * nb);
  // Rounding can push |c| a hair past 1.
  return std::fmax(-1.0, std::fmin(1.0, c));
}

bool all_finite(std::span<const double> values) {
  for (double x : values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows == 0 || cols == 0) throw RejectedInput("matrix dimensions must be positive");
  require_size(values_, rows * cols, "matrix");
  require_finite(values_, "matrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) values[i * n + i] = 1.0;
  return DenseMatrix(n, n, std::move(values));
}

DenseTensor3::DenseTensor3(std::array<std::size_t, 3> dims)
    : DenseTensor3(dims, std::vector<double>(dims[0] * dims[1] * dims[2], 0.0)) {}

DenseTensor3::DenseTensor3(std::array<std::size_t, 3> dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
    throw RejectedInput("tensor dimensions must be positive");
  }
  require_size(values_, dims[0] * dims[1] * dims[2], "tensor");
  require_finite(values_, "tensor");
}

LowRankMatrix::LowRankMatrix(std::size_t rank, std::size_t dim, std::vector<double> u_factors,
                             std::vector<double> v_factors)
    : rank_(rank), dim_(dim), u_(std::move(u_factors)), v_(std::move(v_factors)) {
  if (rank == 0 || dim == 0) throw RejectedInput("low-rank matrix needs rank >= 1 and dim >= 1");
  require_size(u_, rank * dim, "U factors");
  require_size(v_, rank * dim, "V factors");
  require_finite(u_, "U factors");
  require_finite(v_, "V factors");
}

LowRankTensor3::LowRankTensor3(std::size_t rank, std::size_t sentence_dim, std::size_t noun_dim,
                               std::vector<double> p_factors, std::vector<double> q_factors,
                               std::vector<double> r_factors)
    : rank_(rank),
      sentence_dim_(sentence_dim),
      noun_dim_(noun_dim),
      p_(std::move(p_factors)),
      q_(std::move(q_factors)),
      r_(std::move(r_factors)) {
  if (rank == 0 || sentence_dim == 0 || noun_dim == 0) {
    throw RejectedInput("low-rank tensor needs positive rank and dims");
  }
  require_size(p_, rank * sentence_dim, "P factors");
  require_size(q_, rank * noun_dim, "Q factors");
  require_size(r_, rank * noun_dim, "R factors");
  require_finite(p_, "P factors");
  require_finite(q_, "Q factors");
  require_finite(r_, "R factors");
}

namespace kernels {

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> n, std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a.data() + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * n[j];
    out[i] = acc;
  }
}

void bilinear(std::span<const double> v, std::size_t sdim, std::size_t ndim,
              std::span<const double> s, std::span<const double> o, std::span<double> out) {
  for (std::size_t k = 0; k < sdim; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ndim; ++i) {
      const double* row = v.data() + (k * ndim + i) * ndim;
      double inner = 0.0;
      for (std::size_t j = 0; j < ndim; ++j) inner += row[j] * o[j];
      acc += s[i] * inner;
    }
    out[k] = acc;
  }
}

void lowrank_matrix(std::span<const double> u, std::span<const double> v, std::size_t rank,
                    std::size_t ndim, std::span<const double> n, std::span<double> scratch,
                    std::span<double> out) {
  matvec(v, rank, ndim, n, scratch);
  for (std::size_t i = 0; i < ndim; ++i) out[i] = 0.0;
  for (std::size_t r = 0; r < rank; ++r) {
    const double* row = u.data() + r * ndim;
    const double t = scratch[r];
    for (std::size_t i = 0; i < ndim; ++i) out[i] += row[i] * t;
  }
}

void lowrank_tensor3(std::span<const double> p, std::span<const double> q,
                     std::span<const double> r, std::size_t rank, std::size_t sdim,
                     std::size_t ndim, std::span<const double> s, std::span<const double> o,
                     std::span<double> qs, std::span<double> ro, std::span<double> out) {
  matvec(q, rank, ndim, s, qs);
  matvec(r, rank, ndim, o, ro);
  for (std::size_t k = 0; k < sdim; ++k) out[k] = 0.0;
  for (std::size_t c = 0; c < rank; ++c) {
    const double w = qs[c] * ro[c];
    const double* row = p.data() + c * sdim;
    for (std::size_t k = 0; k < sdim; ++k) out[k] += row[k] * w;
  }
}

void reconstruct_lowrank_matrix(std::span<const double> u, std::span<const double> v,
                                std::size_t rank, std::size_t ndim, std::span<double> out) {
  for (std::size_t i = 0; i < ndim * ndim; ++i) out[i] = 0.0;
  for (std::size_t c = 0; c < rank; ++c) {
    const double* ur = u.data() + c * ndim;
    const double* vr = v.data() + c * ndim;
    for (std::size_t i = 0; i < ndim; ++i) {
      for (std::size_t j = 0; j < ndim; ++j) out[i * ndim + j] += ur[i] * vr[j];
    }
  }
}

void reconstruct_cp(std::span<const double> p, std::span<const double> q,
                    std::span<const double> r, std::size_t rank, std::size_t sdim,
                    std::size_t ndim, std::span<double> out) {
  for (std::size_t i = 0; i < sdim * ndim * ndim; ++i) out[i] = 0.0;
  for (std::size_t c = 0; c < rank; ++c) {
    const double* pr = p.data() + c * sdim;
    const double* qr = q.data() + c * ndim;
    const double* rr = r.data() + c * ndim;
    for (std::size_t k = 0; k < sdim; ++k) {
      for (std::size_t i = 0; i < ndim; ++i) {
        const double pq = pr[k] * qr[i];
        double* dst = out.data() + (k * ndim + i) * ndim;
        for (std::size_t j = 0; j < ndim; ++j) dst[j] += pq * rr[j];
      }
    }
  }
}

}  // namespace kernels

Vector matvec(const DenseMatrix& a, std::span<const double> n) {
  require_length(n, a.cols(), "argument vector");
  Vector out(a.rows());
  kernels::matvec(a.values(), a.rows(), a.cols(), n, out);
  return out;
}

Vector bilinear_apply(const DenseTensor3& v, std::span<const double> s, std::span<const double> o) {
  const auto& d = v.dims();
  if (d[1] != d[2]) throw RejectedInput("verb tensor must have shape (S, N, N)");
  require_length(s, d[1], "subject vector");
  require_length(o, d[2], "object vector");
  Vector out(d[0]);
  kernels::bilinear(v.values(), d[0], d[1], s, o, out);
  return out;
}

Vector lowrank_matrix_apply(const LowRankMatrix& m, std::span<const double> n) {
  require_length(n, m.dim(), "argument vector");
  Vector scratch(m.rank());
  Vector out(m.dim());
  kernels::lowrank_matrix(m.u_factors(), m.v_factors(), m.rank(), m.dim(), n, scratch, out);
  return out;
}

Vector lowrank_tensor3_apply(const LowRankTensor3& t, std::span<const double> s,
                             std::span<const double> o) {
  require_length(s, t.noun_dim(), "subject vector");
  require_length(o, t.noun_dim(), "object vector");
  Vector qs(t.rank()), ro(t.rank()), out(t.sentence_dim());
  kernels::lowrank_tensor3(t.p_factors(), t.q_factors(), t.r_factors(), t.rank(),
                           t.sentence_dim(), t.noun_dim(), s, o, qs, ro, out);
  return out;
}

DenseMatrix reconstruct_matrix(const LowRankMatrix& m) {
  std::vector<double> values(m.dim() * m.dim());
  kernels::reconstruct_lowrank_matrix(m.u_factors(), m.v_factors(), m.rank(), m.dim(), values);
  return DenseMatrix(m.dim(), m.dim(), std::move(values));
}

DenseTensor3 reconstruct_tensor3(const LowRankTensor3& t) {
  std::vector<double> values(t.sentence_dim() * t.noun_dim() * t.noun_dim());
  kernels::reconstruct_cp(t.p_factors(), t.q_factors(), t.r_factors(), t.rank(), t.sentence_dim(),
                          t.noun_dim(), values);
  return DenseTensor3({t.sentence_dim(), t.noun_dim(), t.noun_dim()}, std::move(values));
}

double frobenius_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw RejectedInput(fmt::format("Frobenius distance of sizes {} and {}", a.size(), b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw RejectedInput("matrix shape mismatch");
  return frobenius_distance(a.values(), b.values());
}

double frobenius_distance(const DenseTensor3& a, const DenseTensor3& b) {
  if (a.dims() != b.dims()) throw RejectedInput("tensor shape mismatch");
  return frobenius_distance(a.values(), b.values());
}

double frobenius_distance(const LowRankMatrix& a, const LowRankMatrix& b) {
  if (a.rank() != b.rank() || a.dim() != b.dim()) throw RejectedInput("low-rank shape mismatch");
  return frobenius_distance(a.u_factors(), b.u_factors()) +
         frobenius_distance(a.v_factors(), b.v_factors());
}

double frobenius_distance(const LowRankTensor3& a, const LowRankTensor3& b) {
  if (a.rank() != b.rank() || a.sentence_dim() != b.sentence_dim() ||
      a.noun_dim() != b.noun_dim()) {
    throw RejectedInput("low-rank shape mismatch");
  }
  return frobenius_distance(a.p_factors(), b.p_factors()) +
         frobenius_distance(a.q_factors(), b.q_factors()) +
         frobenius_distance(a.r_factors(), b.r_factors());
}

Vector unfurl(const DenseMatrix& a) { return Vector(a.values().begin(), a.values().end()); }
Vector unfurl(const DenseTensor3& v) { return Vector(v.values().begin(), v.values().end()); }
Vector unfurl(const LowRankMatrix& m) { return unfurl(reconstruct_matrix(m)); }
Vector unfurl(const LowRankTensor3& t) { return unfurl(reconstruct_tensor3(t)); }

}  // namespace lexfn
