#pragma once

// Independent reference implementations used only by the tests. They are
// written as naive loops over explicit indices and share no code with the
// library kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lexfn/params.hpp"

namespace oracle {

using Vec = std::vector<double>;

struct Rand {
  explicit Rand(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng); }
  Vec vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  std::mt19937_64 eng;
};

// y[i] = sum_j A[i][j] x[j], row by row.
inline Vec matvec(const Vec& a, std::size_t rows, std::size_t cols, const Vec& x) {
  Vec y(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += a[i * cols + j] * x[j];
    y[i] = s;
  }
  return y;
}

// y[k] = sum_i sum_j V[k][i][j] s[i] o[j].
inline Vec contract(const Vec& v, std::size_t sdim, std::size_t n, const Vec& s, const Vec& o) {
  Vec y(sdim, 0.0);
  for (std::size_t k = 0; k < sdim; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[k] += v[(k * n + i) * n + j] * s[i] * o[j];
  return y;
}

// sum_r u_r (x) v_r as a dense n x n array.
inline Vec outer_sum(const Vec& u, const Vec& v, std::size_t rank, std::size_t n) {
  Vec a(n * n, 0.0);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] += u[r * n + i] * v[r * n + j];
  return a;
}

// sum_r p_r (x) q_r (x) r_r as a dense S x N x N array.
inline Vec cp_sum(const Vec& p, const Vec& q, const Vec& rr, std::size_t rank, std::size_t sdim,
                  std::size_t n) {
  Vec t(sdim * n * n, 0.0);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < sdim; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          t[(k * n + i) * n + j] += p[r * sdim + k] * q[r * n + i] * rr[r * n + j];
  return t;
}

// Dense tensor of any parameter block layout, rebuilt from raw values.
inline Vec dense_of(const lexfn::Params& p) {
  const auto& s = p.shape();
  const auto v = p.values();
  Vec all(v.begin(), v.end());
  const std::size_t n = s.noun_dim;
  if (s.rep == lexfn::Representation::full) return all;
  const std::size_t r = s.rank;
  if (s.kind == lexfn::WordKind::adjective) {
    Vec u(all.begin(), all.begin() + r * n), w(all.begin() + r * n, all.end());
    return outer_sum(u, w, r, n);
  }
  const std::size_t sd = s.sentence_dim;
  Vec pp(all.begin(), all.begin() + r * sd);
  Vec q(all.begin() + r * sd, all.begin() + r * (sd + n));
  Vec rr(all.begin() + r * (sd + n), all.end());
  return cp_sum(pp, q, rr, r, sd, n);
}

// Composition through the dense form.
inline Vec apply_dense(const lexfn::Params& p, const Vec& a0, const Vec& a1) {
  const auto& s = p.shape();
  const Vec d = dense_of(p);
  if (s.kind == lexfn::WordKind::adjective) return matvec(d, s.noun_dim, s.noun_dim, a0);
  return contract(d, s.sentence_dim, s.noun_dim, a0, a1);
}

inline double sq_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Ranks by counting: rank = 1 + #smaller + (#equal - 1) / 2.
inline Vec brute_ranks(const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) less += 1;
      if (x[j] == x[i]) equal += 1;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double pearson(const Vec& x, const Vec& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const Vec& x, const Vec& y) { return pearson(brute_ranks(x), brute_ranks(y)); }

inline double cosine(const Vec& a, const Vec& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

// Central differences of f around x.
inline Vec numeric_gradient(const std::function<double(const Vec&)>& f, Vec x, double h = 1e-5) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||, floor): the relative error used for gradient checks.
inline double rel_error(const Vec& a, const Vec& b, double floor = 1e-6) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(d) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

inline double rel_frobenius(const Vec& est, const Vec& truth) {
  return std::sqrt(sq_dist(est, truth)) / std::sqrt(sq_dist(truth, Vec(truth.size(), 0.0)));
}

}  // namespace oracle
