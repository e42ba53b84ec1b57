#pragma once

// Planted-model data sets: word tensors are fixed first, phrase vectors are
// then produced by applying them to random nouns.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "lexfn/data_io.hpp"
#include "lexfn/embeddings.hpp"
#include "lexfn/params.hpp"
#include "oracles.hpp"

namespace synthetic {

struct Planted {
  lexfn::EmbeddingTable nouns;
  lexfn::EmbeddingTable holistic;
  lexfn::TuplesByWord tuples;
};

inline lexfn::EmbeddingTable random_nouns(std::size_t count, std::size_t dim, oracle::Rand& rng) {
  lexfn::EmbeddingTable t;
  for (std::size_t i = 0; i < count; ++i) t.insert(fmt::format("n{}", i), rng.vec(dim));
  return t;
}

inline oracle::Vec random_params(const lexfn::Shape& shape, oracle::Rand& rng, double scale = 1.0) {
  return rng.vec(shape.size(), -scale, scale);
}

/// `tuples_per_word[w]` noiseless examples z = T_w(args) for every planted
/// word, each with distinct arguments.
inline Planted make_planted(const std::map<std::string, lexfn::Params>& truth,
                            const std::map<std::string, std::size_t>& tuples_per_word,
                            std::size_t noun_count, std::uint64_t seed) {
  oracle::Rand rng(seed);
  Planted out;
  const lexfn::Shape& shape = truth.begin()->second.shape();
  out.nouns = random_nouns(noun_count, shape.noun_dim, rng);
  for (const auto& [word, params] : truth) {
    auto it = tuples_per_word.find(word);
    const std::size_t m = it == tuples_per_word.end() ? 0 : it->second;
    std::set<std::pair<std::size_t, std::size_t>> used;
    auto& list = out.tuples[word];
    while (list.size() < m) {
      const std::size_t a = rng.index(noun_count);
      const std::size_t b = shape.num_args() == 2 ? rng.index(noun_count) : 0;
      if (!used.insert({a, b}).second) continue;
      lexfn::TrainingTuple t;
      t.head = word;
      t.args.push_back(fmt::format("n{}", a));
      if (shape.num_args() == 2) t.args.push_back(fmt::format("n{}", b));
      t.holistic_key = shape.num_args() == 2 ? fmt::format("n{}_{}_n{}", a, word, b)
                                             : fmt::format("{}_n{}", word, a);
      t.occurrence_count = 10;
      const auto& a0 = out.nouns.at(t.args[0]);
      const auto z = shape.num_args() == 2 ? params.apply(a0, out.nouns.at(t.args[1])) : params.apply(a0);
      out.holistic.insert(t.holistic_key, z);
      list.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace synthetic
