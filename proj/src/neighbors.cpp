#include "lexfn/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "lexfn/error.hpp"
#include "text_util.hpp"

namespace lexfn {

std::string_view to_string(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::adjective: return "adjective";
    case PartOfSpeech::verb: return "verb";
    case PartOfSpeech::noun: return "noun";
  }
  return "unknown";
}

void PrecomputedScores::set(const std::string& a, const std::string& b, double score) {
  if (std::isnan(score) || score == std::numeric_limits<double>::infinity()) {
    throw RejectedInput(fmt::format("similarity score for ({}, {}) must be finite", a, b));
  }
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  scores_[key] = score;
  words_[a] = true;
  words_[b] = true;
}

double PrecomputedScores::score(std::string_view a, std::string_view b) const {
  std::string sa(a), sb(b);
  auto key = sa < sb ? std::make_pair(sa, sb) : std::make_pair(sb, sa);
  auto it = scores_.find(key);
  if (it != scores_.end()) return it->second;
  if (a == b) return 1.0;
  return -std::numeric_limits<double>::infinity();
}

SimilaritySource SimilaritySource::from_embeddings(EmbeddingTable table) {
  SimilaritySource src;
  src.kind_ = Kind::embedding_cosine;
  src.embeddings_ = std::make_shared<const EmbeddingTable>(std::move(table));
  return src;
}

SimilaritySource SimilaritySource::from_scores(PrecomputedScores scores) {
  SimilaritySource src;
  src.kind_ = Kind::precomputed_matrix;
  src.scores_ = std::make_shared<const PrecomputedScores>(std::move(scores));
  return src;
}

bool SimilaritySource::knows(std::string_view word) const {
  if (kind_ == Kind::embedding_cosine) return embeddings_ && embeddings_->contains(word);
  return scores_ && scores_->knows(word);
}

double phi(const SimilaritySource& src, const WordId& w1, const WordId& w2) {
  for (const WordId* w : {&w1, &w2}) {
    if (!src.knows(w->surface)) throw MissingWord(w->surface, "no similarity data");
  }
  if (src.kind_ == SimilaritySource::Kind::embedding_cosine) {
    return cosine(src.embeddings_->at(w1.surface), src.embeddings_->at(w2.surface));
  }
  return src.scores_->score(w1.surface, w2.surface);
}

const std::vector<Neighbor>& NeighborGraph::neighbors_of(std::string_view word) const {
  static const std::vector<Neighbor> none;
  auto it = entries.find(word);
  return it == entries.end() ? none : it->second;
}

NeighborGraph build_graph(const SimilaritySource& src, const std::vector<WordId>& vocab,
                          std::size_t k, const GraphOptions& options) {
  if (k == 0) throw RejectedInput("neighbor count k must be at least 1");
  std::vector<WordId> words = vocab;
  std::sort(words.begin(), words.end());
  if (std::adjacent_find(words.begin(), words.end()) != words.end()) {
    throw RejectedInput("vocabulary contains duplicate words");
  }
  if (words.size() < 2) throw RejectedInput("neighbor graph needs at least two words");
  for (const auto& w : words) {
    if (w.pos != words.front().pos) {
      throw RejectedInput("neighbor relations cannot cross parts of speech");
    }
    if (w.surface.empty()) throw RejectedInput("empty surface form in vocabulary");
  }

  NeighborGraph graph;
  graph.k = k;
  graph.pos = words.front().pos;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (const auto& w : words) {
    std::vector<Neighbor> candidates;
    candidates.reserve(words.size() - 1);
    for (const auto& other : words) {
      if (other.surface == w.surface) continue;
      double score = phi(src, w, other);
      if (score == neg_inf) continue;
      candidates.push_back({other.surface, score});
    }
    // words is sorted, so a stable sort on score keeps the lexicographic tie-break.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Neighbor& a, const Neighbor& b) { return a.phi > b.phi; });
    if (candidates.size() > k) candidates.resize(k);
    if (options.clamp_phi_nonnegative) {
      for (auto& c : candidates) c.phi = std::max(0.0, c.phi);
    }
    graph.entries.emplace(w.surface, std::move(candidates));
  }
  return graph;
}

std::string format_graph(const NeighborGraph& graph) {
  std::string out;
  for (const auto& [word, list] : graph.entries) {
    for (const auto& n : list) out += fmt::format("{}\t{}\t{}\n", word, n.word, n.phi);
  }
  return out;
}

void save_graph(const NeighborGraph& graph, const std::string& path) {
  text::write_file(path, format_graph(graph));
}

NeighborGraph load_graph(const std::string& path, PartOfSpeech pos) {
  auto in = text::open_input(path);
  NeighborGraph graph;
  graph.pos = pos;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = text::strip_cr(line);
    if (view.empty()) continue;
    auto fields = text::split(view, '\t');
    if (fields.size() != 3) throw ParseError(path, lineno, "expected word<TAB>neighbor<TAB>phi");
    auto weight = text::parse_double(fields[2]);
    if (!weight) throw ParseError(path, lineno, "invalid phi value");
    auto& list = graph.entries[std::string(fields[0])];
    if (!list.empty() && list.back().phi < *weight) {
      throw ParseError(path, lineno, "neighbor weights must be non-increasing");
    }
    list.push_back({std::string(fields[1]), *weight});
    graph.k = std::max(graph.k, list.size());
  }
  return graph;
}

PrecomputedScores load_scores(const std::string& path) {
  auto in = text::open_input(path);
  PrecomputedScores scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = text::strip_cr(line);
    if (view.empty()) continue;
    auto fields = text::split(view, '\t');
    if (fields.size() != 3) throw ParseError(path, lineno, "expected word1<TAB>word2<TAB>score");
    auto value = text::parse_double(fields[2]);
    if (!value || !std::isfinite(*value)) throw ParseError(path, lineno, "invalid score");
    scores.set(std::string(fields[0]), std::string(fields[1]), *value);
  }
  return scores;
}

}  // namespace lexfn
