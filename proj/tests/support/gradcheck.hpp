#pragma once

// Random multi-word systems for comparing analytic gradients of the global
// objective with central differences.

#include <fmt/format.h>

#include "lexfn/objectives.hpp"
#include "lexfn/params.hpp"
#include "oracles.hpp"

namespace gradcheck {

struct System {
  lexfn::ParamsStore store;
  std::vector<lexfn::ExampleBatch> batches;
  std::vector<lexfn::WordObjective> terms;
  lexfn::IndexedGraph graph;
  lexfn::ObjectiveConfig config;
};

inline lexfn::Shape random_shape(lexfn::WordKind kind, lexfn::Representation rep, oracle::Rand& rng) {
  const std::size_t n = 1 + rng.index(8), s = 1 + rng.index(6), r = 1 + rng.index(3);
  using lexfn::Shape;
  if (kind == lexfn::WordKind::adjective) {
    return rep == lexfn::Representation::full ? Shape::full_adjective(n) : Shape::lowrank_adjective(n, r);
  }
  return rep == lexfn::Representation::full ? Shape::full_verb(s, n) : Shape::lowrank_verb(s, n, r);
}

/// Three or four words, random parameters and data; the last word has no
/// examples. `alpha` applies to every word.
inline System random_system(lexfn::WordKind kind, lexfn::Representation rep, double alpha, double beta,
                            std::uint64_t seed) {
  oracle::Rand rng(seed);
  const lexfn::Shape shape = random_shape(kind, rep, rng);
  const std::size_t words = 3 + rng.index(2);
  std::vector<std::string> names;
  for (std::size_t w = 0; w < words; ++w) names.push_back(fmt::format("w{}", w));
  System sys{lexfn::ParamsStore(shape, names), {}, {}, {}, {}};
  for (std::size_t w = 0; w < words; ++w) {
    auto v = sys.store[w].values();
    for (auto& x : v) x = rng.uniform();
  }
  sys.batches.resize(words);
  for (std::size_t w = 0; w + 1 < words; ++w) {
    lexfn::ExampleBatch b(shape.noun_dim, shape.output_dim(), shape.num_args());
    const std::size_t m = 1 + rng.index(4);
    for (std::size_t i = 0; i < m; ++i) {
      const auto a0 = rng.vec(shape.noun_dim), a1 = rng.vec(shape.noun_dim), z = rng.vec(shape.output_dim());
      b.add(a0, shape.num_args() == 2 ? std::span<const double>(a1) : std::span<const double>{}, z);
    }
    sys.batches[w] = std::move(b);
  }
  sys.config.alpha = alpha;
  sys.config.beta = beta;
  sys.config.k = 2;
  sys.config.representation = rep;
  sys.config.l2_lambda = rep == lexfn::Representation::full ? 0.1 : 0.0;
  sys.graph.resize(words);
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t count = 1 + rng.index(2);
    for (std::size_t j = 1; j <= count; ++j) {
      sys.graph[w].push_back({(w + j) % words, rng.uniform(-0.5, 1.0)});
    }
  }
  for (std::size_t w = 0; w < words; ++w) sys.terms.push_back({&sys.batches[w], alpha});
  return sys;
}

/// Relative error between the analytic and numeric gradient over all words.
inline double check(System& sys, double h = 1e-5) {
  const auto g = lexfn::gradients(sys.store, sys.terms, sys.graph, sys.config);
  oracle::Vec flat, analytic;
  for (std::size_t w = 0; w < sys.store.size(); ++w) {
    auto v = sys.store[w].values();
    flat.insert(flat.end(), v.begin(), v.end());
    analytic.insert(analytic.end(), g.grads[w].begin(), g.grads[w].end());
  }
  auto objective = [&](const oracle::Vec& x) {
    std::size_t pos = 0;
    for (std::size_t w = 0; w < sys.store.size(); ++w) {
      auto v = sys.store[w].values();
      for (auto& e : v) e = x[pos++];
    }
    return lexfn::total_objective(sys.store, sys.terms, sys.graph, sys.config);
  };
  const auto numeric = oracle::numeric_gradient(objective, flat, h);
  objective(flat);
  return oracle::rel_error(analytic, numeric);
}

}  // namespace gradcheck
