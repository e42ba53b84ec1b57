#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <fmt/format.h>

#include "lexfn/error.hpp"
#include "lexfn/glf.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace lexfn;
using oracle::Vec;

namespace {

Vec values_of(const DenseMatrix& m) { return Vec(m.values().begin(), m.values().end()); }

Vec basis(std::size_t d, std::size_t i) {
  Vec e(d, 0.0);
  e[i] = 1.0;
  return e;
}

struct PlantedGlf {
  GlfTensor truth;
  std::map<std::string, DenseMatrix> train;
  EmbeddingTable vectors;
  std::vector<Vec> held_out;
};

PlantedGlf planted(std::size_t n, std::size_t d, std::size_t words, std::uint64_t seed) {
  oracle::Rand rng(seed);
  PlantedGlf p{GlfTensor(n, d, rng.vec(n * n * d)), {}, {}, {}};
  for (std::size_t j = 0; j < words; ++j) {
    const auto name = fmt::format("adj{}", j);
    const Vec a = rng.vec(d);
    p.vectors.insert(name, a);
    p.train.emplace(name, glf_predict(p.truth, a));
  }
  for (int j = 0; j < 10; ++j) p.held_out.push_back(rng.vec(d));
  return p;
}

}  // namespace

TEST_CASE("glf_predict examples") {
  oracle::Rand rng(91);
  const GlfTensor g(3, 4, rng.vec(36));
  const auto zero = glf_predict(g, Vec(4, 0.0));
  for (double x : zero.values()) CHECK(x == 0.0);

  Vec slice0(36, 0.0);
  for (std::size_t ij = 0; ij < 9; ++ij) slice0[ij * 4] = static_cast<double>(ij) + 0.5;
  const auto m = glf_predict(GlfTensor(3, 4, slice0), basis(4, 0));
  for (std::size_t ij = 0; ij < 9; ++ij) CHECK(m.values()[ij] == static_cast<double>(ij) + 0.5);

  CHECK_THROWS_AS(glf_predict(g, Vec(3, 1.0)), RejectedInput);
  CHECK_THROWS_AS(GlfTensor(3, 4, Vec(35)), RejectedInput);
  CHECK_THROWS_AS(GlfTensor(0, 4), RejectedInput);
}

TEST_CASE("glf_predict is linear") {
  oracle::Rand rng(92);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.index(6), d = 1 + rng.index(8);
    const GlfTensor g(n, d, rng.vec(n * n * d));
    const Vec a1 = rng.vec(d), a2 = rng.vec(d);
    const double c = rng.uniform(-3, 3);
    Vec sum(d), scaled(d);
    for (std::size_t i = 0; i < d; ++i) {
      sum[i] = a1[i] + a2[i];
      scaled[i] = c * a1[i];
    }
    const Vec m1 = values_of(glf_predict(g, a1)), m2 = values_of(glf_predict(g, a2));
    const Vec ms = values_of(glf_predict(g, sum)), mc = values_of(glf_predict(g, scaled));
    for (std::size_t i = 0; i < m1.size(); ++i) {
      CHECK(std::abs(ms[i] - (m1[i] + m2[i])) < 1e-10);
      CHECK(std::abs(mc[i] - c * m1[i]) < 1e-10);
    }
  }
}

TEST_CASE("glf_predict matches a naive contraction") {
  oracle::Rand rng(93);
  const std::size_t n = 4, d = 3;
  const GlfTensor g(n, d, rng.vec(n * n * d));
  const Vec a = rng.vec(d);
  const Vec got = values_of(glf_predict(g, a));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < d; ++k) s += g(i, j, k) * a[k];
      CHECK(std::abs(got[i * n + j] - s) < 1e-14);
    }
}

TEST_CASE("glf objective gradient matches central differences") {
  oracle::Rand rng(94);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng.index(4), d = 1 + rng.index(5), m = 1 + rng.index(5);
    std::vector<GlfExample> ex;
    for (std::size_t j = 0; j < m; ++j) ex.push_back({rng.vec(d), DenseMatrix(n, n, rng.vec(n * n))});
    const Vec x0 = rng.vec(n * n * d);
    std::vector<double> grad;
    glf_objective(GlfTensor(n, d, x0), ex, &grad);
    const auto numeric =
        oracle::numeric_gradient([&](const Vec& x) { return glf_objective(GlfTensor(n, d, x), ex); }, x0);
    CHECK(oracle::rel_error(grad, numeric) < 1e-4);
  }
  CHECK_THROWS_AS(glf_objective(GlfTensor(2, 2), {}), DegenerateObjective);
}

TEST_CASE("glf_train reaches basis-vector targets") {
  oracle::Rand rng(95);
  const std::size_t n = 3, d = 2;
  const DenseMatrix a1(n, n, rng.vec(n * n)), a2(n, n, rng.vec(n * n));
  EmbeddingTable vectors;
  vectors.insert("first", basis(d, 0));
  vectors.insert("second", basis(d, 1));
  TrainConfig cfg;
  cfg.max_iterations = 3000;
  cfg.stagnation_tolerance = 1e-12;
  const auto fit = glf_train({{"first", a1}, {"second", a2}}, vectors, cfg);
  const Vec p1 = values_of(glf_predict(fit.tensor, basis(d, 0)));
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(std::abs(p1[i] - a1.values()[i]) < 1e-3);
  for (std::size_t ij = 0; ij < n * n; ++ij) CHECK(std::abs(fit.tensor(ij / n, ij % n, 0) - a1.values()[ij]) < 1e-3);
}

TEST_CASE("glf_train recovers a planted tensor") {
  const auto p = planted(6, 8, 50, 96);
  TrainConfig cfg;
  cfg.batch_size = kGlfBatchSize;
  const auto fit = glf_train(p.train, p.vectors, cfg);
  CHECK(fit.iterations <= 200);
  for (const auto& a : p.held_out) {
    const double err = oracle::rel_frobenius(values_of(glf_predict(fit.tensor, a)),
                                             values_of(glf_predict(p.truth, a)));
    CHECK(err < 0.05);
  }
}

TEST_CASE("glf_train on zero targets stays at zero") {
  oracle::Rand rng(97);
  std::map<std::string, DenseMatrix> zeros;
  EmbeddingTable vectors;
  for (int j = 0; j < 5; ++j) {
    const auto name = fmt::format("w{}", j);
    zeros.emplace(name, DenseMatrix(3, 3));
    vectors.insert(name, rng.vec(4));
  }
  const auto fit = glf_train(zeros, vectors, TrainConfig{});
  for (int t = 0; t < 5; ++t) CHECK(lexfn::norm(glf_predict(fit.tensor, rng.vec(4)).values()) < 1e-6);
}

TEST_CASE("glf_train input checks") {
  EmbeddingTable vectors;
  vectors.insert("a", {1, 0});
  vectors.insert("b", {0, 1});
  const DenseMatrix m(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_AS(glf_train({{"a", m}}, vectors, TrainConfig{}), RejectedInput);
  try {
    glf_train({{"a", m}, {"c", m}}, vectors, TrainConfig{});
    FAIL("expected MissingWord");
  } catch (const MissingWord& e) {
    CHECK(e.word() == "c");
  }
  CHECK_THROWS_AS(glf_train({{"a", m}, {"b", DenseMatrix(3, 3)}}, vectors, TrainConfig{}), RejectedInput);
}

TEST_CASE("glf_train is deterministic") {
  const auto p = planted(3, 4, 12, 98);
  TrainConfig cfg;
  cfg.max_iterations = 30;
  CHECK(glf_train(p.train, p.vectors, cfg).tensor == glf_train(p.train, p.vectors, cfg).tensor);
}

TEST_CASE("glf_pretrain keeps data-rich adjectives only") {
  oracle::Rand rng(99);
  const auto shape = Shape::full_adjective(4);
  std::map<std::string, Params> truth;
  for (const char* w : {"rich", "poor", "also_rich"}) truth.emplace(w, Params(shape, rng.vec(16)));
  const auto data = synthetic::make_planted(truth, {{"rich", 60}, {"poor", 10}, {"also_rich", 50}}, 80, 100);
  TrainConfig cfg;
  cfg.max_iterations = 20;
  const auto mats = glf_pretrain(data.tuples, data.nouns, data.holistic, kGlfMinTuples, cfg);
  CHECK(mats.size() == 2);
  CHECK(mats.count("rich") == 1);
  CHECK(mats.count("also_rich") == 1);
  CHECK(mats.at("rich").rows() == 4);
  CHECK_THROWS_AS(glf_pretrain(data.tuples, data.nouns, data.holistic, 1000, cfg), RejectedInput);
  CHECK(kGlfMinTuples == 50);
}
