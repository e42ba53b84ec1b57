#include "lexfn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "lexfn/error.hpp"
#include "random.hpp"

namespace lexfn {

std::string_view to_string(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::compose: return "compose";
    case ScoreMode::unfurl: return "unfurl";
    case ScoreMode::additive: return "additive";
  }
  return "unknown";
}

ScoreMode parse_score_mode(std::string_view text) {
  if (text == "compose") return ScoreMode::compose;
  if (text == "unfurl") return ScoreMode::unfurl;
  if (text == "additive") return ScoreMode::additive;
  throw RejectedInput(fmt::format("unknown score mode '{}'", text));
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && xs[order[j]] == xs[order[i]]) ++j;
    // positions i..j-1 (0-based) share the mean 1-based rank
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    i = j;
  }
  return ranks;
}

namespace {

struct Centered {
  std::vector<double> values;
  double ss = 0.0;
};

Centered center(const std::vector<double>& r) {
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  Centered c;
  c.values.reserve(r.size());
  for (double x : r) {
    c.values.push_back(x - mean);
    c.ss += (x - mean) * (x - mean);
  }
  return c;
}

double correlation(const Centered& x, const Centered& y) {
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) sxy += x.values[i] * y.values[i];
  return std::clamp(sxy / std::sqrt(x.ss * y.ss), -1.0, 1.0);
}

}  // namespace

SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys,
                        const SpearmanOptions& options) {
  if (xs.size() != ys.size()) {
    throw RejectedInput(fmt::format("spearman inputs differ in length ({} vs {})", xs.size(), ys.size()));
  }
  const std::size_t n = xs.size();
  if (n < 3) throw UndefinedCorrelation(fmt::format("spearman needs at least 3 points, got {}", n));
  if (!all_finite(xs) || !all_finite(ys)) throw RejectedInput("spearman inputs must be finite");
  const Centered rx = center(average_ranks(xs));
  Centered ry = center(average_ranks(ys));
  if (rx.ss == 0.0 || ry.ss == 0.0) throw UndefinedCorrelation("spearman input is constant");

  SpearmanResult out;
  out.rho = correlation(rx, ry);
  if (options.method == PValueMethod::t_approx) {
    const double df = static_cast<double>(n - 2);
    const double denom = 1.0 - out.rho * out.rho;
    if (denom <= 0.0) {
      out.p_value = 0.0;
    } else {
      boost::math::students_t dist(df);
      const double t = std::abs(out.rho) * std::sqrt(df / denom);
      out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    }
    return out;
  }

  if (options.permutations == 0) throw RejectedInput("permutation test needs at least one permutation");
  detail::Rng rng(options.seed);
  const double threshold = std::abs(out.rho) - 1e-12;
  std::size_t hits = 0;
  for (std::size_t b = 0; b < options.permutations; ++b) {
    rng.shuffle(ry.values);
    if (std::abs(correlation(rx, ry)) >= threshold) ++hits;
  }
  out.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + options.permutations);
  return out;
}

namespace {

std::string describe(const EvalItem& item) {
  std::string s;
  for (const auto& w : item.left) s += (s.empty() ? "" : " ") + w;
  s += " |";
  for (const auto& w : item.right) s += " " + w;
  return s;
}

Vector compose_side(const ParamsStore& store, const EmbeddingTable& nouns,
                    const std::vector<std::string>& side, EvalShape shape) {
  if (shape == EvalShape::an_pair) {
    return store.at(side[0]).apply(nouns.at(side[1]));
  }
  return store.at(side[1]).apply(nouns.at(side[0]), nouns.at(side[2]));
}

void check_arity(const EvalItem& item) {
  const std::size_t w = words_per_side(item.shape);
  if (item.left.size() != w || item.right.size() != w) {
    throw RejectedInput(fmt::format("item '{}' does not have {} words per side", describe(item), w));
  }
}

}  // namespace

double model_score(const ParamsStore& store, const EmbeddingTable& nouns, const EvalItem& item,
                   ScoreMode mode) {
  check_arity(item);
  try {
    switch (mode) {
      case ScoreMode::compose: {
        if (item.shape == EvalShape::word_pair) {
          throw RejectedInput("compose mode needs phrase items; use unfurl for word pairs");
        }
        const Shape& s = store.shape();
        if ((item.shape == EvalShape::an_pair) != (s.kind == WordKind::adjective)) {
          throw RejectedInput(fmt::format("{} items cannot be scored with a {} model",
                                          to_string(item.shape), to_string(s.kind)));
        }
        return cosine(compose_side(store, nouns, item.left, item.shape),
                      compose_side(store, nouns, item.right, item.shape));
      }
      case ScoreMode::unfurl:
        if (item.shape != EvalShape::word_pair) {
          throw RejectedInput("unfurl mode compares single words; use compose for phrases");
        }
        return cosine(store.at(item.left[0]).unfurl(), store.at(item.right[0]).unfurl());
      case ScoreMode::additive:
        return additive_score(nouns, item);
    }
  } catch (const MissingWord& e) {
    throw MissingWord(e.word(), fmt::format("needed by item '{}'", describe(item)));
  }
  throw RejectedInput("unknown score mode");
}

double additive_score(const EmbeddingTable& vectors, const EvalItem& item) {
  check_arity(item);
  auto sum = [&](const std::vector<std::string>& side) {
    Vector acc(vectors.dim(), 0.0);
    for (const auto& w : side) {
      const Vector* v = vectors.find(w);
      if (!v) throw MissingWord(w, fmt::format("needed by item '{}'", describe(item)));
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (*v)[i];
    }
    return acc;
  };
  return cosine(sum(item.left), sum(item.right));
}

ScoredDataset score_items(std::span<const EvalItem> items,
                          const std::function<double(const EvalItem&)>& scorer,
                          const SpearmanOptions& options) {
  ScoredDataset out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      const double s = scorer(items[i]);
      out.items.push_back({i, items[i], s});
    } catch (const MissingWord&) {
      ++out.dropped;
    }
  }
  out.n = out.items.size();
  if (out.items.empty()) {
    throw EmptyEvaluation(fmt::format("all {} items were dropped for missing words", items.size()));
  }
  std::vector<double> model, gold;
  for (const auto& s : out.items) {
    model.push_back(s.model_score);
    gold.push_back(s.item.gold_score);
  }
  const auto r = spearman(model, gold, options);
  out.rho = r.rho;
  out.p_value = r.p_value;
  return out;
}

ScoredDataset score_dataset(const ParamsStore& store, const EmbeddingTable& nouns,
                            std::span<const EvalItem> items, ScoreMode mode,
                            const SpearmanOptions& options) {
  return score_items(
      items, [&](const EvalItem& item) { return model_score(store, nouns, item, mode); }, options);
}

std::string format_report_line(std::string_view dataset, ScoreMode mode, const ScoredDataset& scored) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", dataset, to_string(mode), scored.n, scored.dropped,
                     scored.rho, scored.p_value);
}

std::string format_item_csv(const ScoredDataset& scored) {
  std::string out = "item_id,model_score,gold_score\n";
  for (const auto& s : scored.items) {
    out += fmt::format("{},{},{}\n", s.item_id, s.model_score, s.item.gold_score);
  }
  return out;
}

std::vector<ScoredWord> nearest_neighbors(const ParamsStore& store, std::string_view word,
                                          std::size_t top_n) {
  const std::size_t self = store.index_of(word);
  const Vector target = store[self].unfurl();
  std::vector<ScoredWord> all;
  for (std::size_t w = 0; w < store.size(); ++w) {
    if (w == self) continue;
    all.push_back({store.word(w), cosine(target, store[w].unfurl())});
  }
  // store order is lexicographic, so a stable sort keeps ties in that order
  std::stable_sort(all.begin(), all.end(),
                   [](const ScoredWord& a, const ScoredWord& b) { return a.score > b.score; });
  if (all.size() > top_n) all.resize(top_n);
  return all;
}

std::string format_tensor_diagnostics(const ParamsStore& store) {
  std::string out;
  for (std::size_t w = 0; w < store.size(); ++w) {
    out += fmt::format("{}\t{}\n", store.word(w), max_abs_entry(store[w]));
  }
  return out;
}

ParamsStore mixture_store(const ParamsStore& store, const NeighborGraph& graph, double alpha,
                          const ObjectiveConfig& config) {
  ParamsStore out = store;
  for (std::size_t w = 0; w < store.size(); ++w) {
    std::vector<WeightedParams> nbs;
    for (const auto& nb : graph.neighbors_of(store.word(w))) {
      if (store.contains(nb.word)) nbs.push_back({&store.at(nb.word), nb.phi});
    }
    out[w] = ps_effective_params(store[w], nbs, alpha, config.divisor(nbs.size()));
  }
  return out;
}

}  // namespace lexfn
