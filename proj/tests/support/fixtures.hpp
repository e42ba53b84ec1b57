#pragma once

// A small on-disk corpus for driving the command-line tool: planted
// adjective matrices and verb tensors, their phrase vectors, counts, word
// vectors for the neighbor graph and a few rated datasets.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lexfn/data_io.hpp"
#include "lexfn/params.hpp"
#include "oracles.hpp"

namespace fixtures {

struct Corpus {
  std::string dir;
  std::string nouns, counts, adj_vectors, verb_vectors, vocab;
  std::string adj_tuples, adj_holistic, verb_tuples, verb_holistic, huge_holistic;
  std::string adj_pairs, an_pairs, svo_pairs;
  std::vector<std::string> adjectives, verbs;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string vec_text(const oracle::Vec& v) {
  std::string s;
  for (double x : v) s += fmt::format(" {}", x);
  return s;
}

/// `clusters` groups of `per_cluster` adjectives (and a few verbs); words in a
/// group share a planted tensor up to small noise.
inline Corpus write_corpus(const std::filesystem::path& dir, std::uint64_t seed, std::size_t clusters = 2,
                           std::size_t per_cluster = 4, std::size_t tuples_per_word = 25) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  oracle::Rand rng(seed);
  Corpus c;
  c.dir = dir.string();
  auto path = [&](const char* name) { return (dir / name).string(); };
  const std::size_t n = 4, s = 3, noun_count = 40;

  std::vector<oracle::Vec> nouns;
  std::string nouns_txt, counts_txt;
  for (std::size_t i = 0; i < noun_count; ++i) {
    nouns.push_back(rng.vec(n));
    nouns_txt += fmt::format("n{}{}\n", i, vec_text(nouns.back()));
    counts_txt += fmt::format("n{}\t{}\n", i, 150 + i);
  }
  c.nouns = path("nouns.txt");
  c.counts = path("counts.tsv");
  write_file(c.nouns, nouns_txt);
  write_file(c.counts, counts_txt);

  std::string adj_tuples, adj_hol, huge_hol, adj_vec;
  std::string verb_tuples, verb_hol, verb_vec;
  const auto adj_shape = lexfn::Shape::full_adjective(n);
  const auto verb_shape = lexfn::Shape::full_verb(s, n);
  for (std::size_t k = 0; k < clusters; ++k) {
    const oracle::Vec centre = rng.vec(adj_shape.size());
    const oracle::Vec vcentre = rng.vec(verb_shape.size());
    const oracle::Vec direction = rng.vec(3);
    for (std::size_t m = 0; m < per_cluster; ++m) {
      const std::string adj = fmt::format("a{}{}", k, m), verb = fmt::format("v{}{}", k, m);
      c.adjectives.push_back(adj);
      oracle::Vec a = centre, v = vcentre, wv = direction;
      for (auto& x : a) x += rng.uniform(-0.05, 0.05);
      for (auto& x : v) x += rng.uniform(-0.05, 0.05);
      for (auto& x : wv) x += rng.uniform(-0.1, 0.1);
      adj_vec += adj + vec_text(wv) + "\n";
      const lexfn::Params ap(adj_shape, a), vp(verb_shape, v);
      // the last word of each group has no tuples at all
      const std::size_t count = m + 1 == per_cluster ? 0 : tuples_per_word;
      for (std::size_t t = 0; t < count; ++t) {
        const std::size_t i = (t * 7 + k + m) % noun_count;
        const std::string key = fmt::format("{}_n{}", adj, i);
        adj_tuples += fmt::format("{}\tn{}\t{}\t{}\n", adj, i, key, 3 + t % 4);
        adj_hol += key + vec_text(ap.apply(nouns[i])) + "\n";
        oracle::Vec big = ap.apply(nouns[i]);
        for (auto& x : big) x *= 1e200;
        huge_hol += key + vec_text(big) + "\n";
      }
      if (m < 3) {
        c.verbs.push_back(verb);
        verb_vec += verb + vec_text(wv) + "\n";
        for (std::size_t t = 0; t < (m == 2 ? 0 : tuples_per_word); ++t) {
          const std::size_t i = (t * 3 + k) % noun_count, j = (t * 11 + m + 5) % noun_count;
          const std::string key = fmt::format("n{}_{}_n{}", i, verb, j);
          verb_tuples += fmt::format("n{}\t{}\tn{}\t{}\t{}\n", i, verb, j, key, 2 + t % 3);
          verb_hol += key + vec_text(vp.apply(nouns[i], nouns[j])) + "\n";
        }
      }
    }
  }
  c.adj_tuples = path("adj_tuples.tsv");
  c.adj_holistic = path("adj_holistic.txt");
  c.huge_holistic = path("huge_holistic.txt");
  c.adj_vectors = path("adj_vectors.txt");
  c.verb_tuples = path("verb_tuples.tsv");
  c.verb_holistic = path("verb_holistic.txt");
  c.verb_vectors = path("verb_vectors.txt");
  write_file(c.adj_tuples, adj_tuples);
  write_file(c.adj_holistic, adj_hol);
  write_file(c.huge_holistic, huge_hol);
  write_file(c.adj_vectors, adj_vec);
  write_file(c.verb_tuples, verb_tuples);
  write_file(c.verb_holistic, verb_hol);
  write_file(c.verb_vectors, verb_vec);

  std::string vocab;
  for (const auto& a : c.adjectives) vocab += a + "\n";
  c.vocab = path("vocab.txt");
  write_file(c.vocab, vocab);

  std::string pairs, an, svo;
  for (std::size_t i = 0; i < c.adjectives.size(); ++i) {
    for (std::size_t j = i + 1; j < c.adjectives.size(); ++j) {
      pairs += fmt::format("{} {} {}\n", c.adjectives[i], c.adjectives[j], rng.uniform(0, 7));
      an += fmt::format("{} n{} {} n{} {}\n", c.adjectives[i], i, c.adjectives[j], j + 1, rng.uniform(1, 7));
    }
  }
  for (std::size_t i = 0; i < c.verbs.size(); ++i) {
    for (std::size_t j = 0; j < c.verbs.size(); ++j) {
      svo += fmt::format("n{} {} n{} n{} {} n{} {}\n", i, c.verbs[i], j, i, c.verbs[j], j, rng.uniform(1, 7));
    }
  }
  // one pair mentions a word without a model
  pairs += fmt::format("{} unknownword 3.0\n", c.adjectives[0]);
  c.adj_pairs = path("simlex_adj.txt");
  c.an_pairs = path("ml10_an.txt");
  c.svo_pairs = path("ks14_svo.txt");
  write_file(c.adj_pairs, pairs);
  write_file(c.an_pairs, an);
  write_file(c.svo_pairs, svo);
  return c;
}

}  // namespace fixtures
