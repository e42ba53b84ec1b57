#include "lexfn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "lexfn/adadelta.hpp"
#include "lexfn/error.hpp"
#include "random.hpp"

namespace lexfn {

namespace {

// ceil(fraction * m), ignoring rounding noise in the product.
std::size_t ceil_count(double fraction, std::size_t m) {
  const double x = fraction * static_cast<double>(m);
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

std::vector<std::size_t> sample_indices(std::size_t m, std::size_t keep, std::uint64_t seed) {
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  detail::Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(std::min(keep, m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void check_percent(double percent) {
  if (!(percent > 0.0 && percent <= 100.0)) {
    throw RejectedInput(fmt::format("percentage {} outside (0, 100]", percent));
  }
}

struct WordPlan {
  ExampleBatch train;
  ExampleBatch validation;
  std::vector<ExampleBatch> minibatches;
  double alpha = 0.0;
  std::size_t tuples = 0;
};

/// Consecutive epoch-to-epoch changes satisfying `pred`, counted back from the end.
template <typename Pred>
std::size_t trailing_run(const std::vector<double>& history, Pred pred) {
  std::size_t run = 0;
  for (std::size_t i = history.size(); i >= 2; --i) {
    if (!pred(history[i - 2], history[i - 1])) break;
    ++run;
  }
  return run;
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iters: return "max-iters";
    case StopReason::stagnation: return "stagnation";
    case StopReason::error_increase: return "error-increase";
    case StopReason::validation_increase: return "validation-increase";
  }
  return "unknown";
}

const WordReport& TrainReport::at(std::string_view word) const {
  for (const auto& w : words) {
    if (w.word == word) return w;
  }
  throw MissingWord(std::string(word), "not in training report");
}

std::string TrainReport::format() const {
  std::string out;
  for (const auto& w : words) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", w.word, w.final_train_loss,
                       w.final_val_loss ? fmt::format("{}", *w.final_val_loss) : std::string("-"),
                       w.iterations, to_string(w.stop_reason));
  }
  return out;
}

std::uint64_t word_seed(std::uint64_t seed, std::string_view word, std::string_view salt) {
  std::uint64_t h = fnv1a64(word);
  h = fnv1a64(salt, h ^ 0x9e3779b97f4a7c15ULL);
  return detail::splitmix64(seed ^ detail::splitmix64(h));
}

ParamsStore initialize_store(const Shape& shape, const std::vector<std::string>& vocab,
                             std::uint64_t seed) {
  ParamsStore store(shape, vocab);
  const double by_noun = 1.0 / std::sqrt(static_cast<double>(shape.noun_dim));
  const double by_rank = shape.rank > 0 ? 1.0 / std::sqrt(static_cast<double>(shape.rank)) : 0.0;
  for (std::size_t w = 0; w < store.size(); ++w) {
    detail::Rng rng(word_seed(seed, store.word(w), "init"));
    Params& p = store[w];
    for (std::size_t b = 0; b < shape.num_blocks(); ++b) {
      // Block 0 of a low-rank form (U or P) feeds the output from the rank space.
      const double s = (shape.rep == Representation::lowrank && b == 0) ? by_rank : by_noun;
      for (double& x : p.block(b)) x = rng.uniform(-s, s);
    }
  }
  return store;
}

std::pair<std::vector<TrainingTuple>, std::vector<TrainingTuple>> split_validation(
    const std::vector<TrainingTuple>& tuples, double fraction, std::size_t min_points,
    std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw RejectedInput(fmt::format("validation fraction {} outside [0, 1)", fraction));
  }
  if (tuples.size() < min_points || fraction == 0.0) return {tuples, {}};
  const std::size_t m = tuples.size();
  auto held = sample_indices(m, ceil_count(fraction, m), seed);
  std::vector<char> is_val(m, 0);
  for (auto i : held) is_val[i] = 1;
  std::vector<TrainingTuple> train, val;
  for (std::size_t i = 0; i < m; ++i) (is_val[i] ? val : train).push_back(tuples[i]);
  return {std::move(train), std::move(val)};
}

TuplesByWord ablate_tuples(const TuplesByWord& tuples, double percent, std::uint64_t seed) {
  check_percent(percent);
  TuplesByWord out;
  for (const auto& [word, list] : tuples) {
    if (list.empty()) {
      out.emplace(word, list);
      continue;
    }
    const std::size_t keep = std::max<std::size_t>(1, ceil_count(percent / 100.0, list.size()));
    std::vector<TrainingTuple> kept;
    for (auto i : sample_indices(list.size(), keep, word_seed(seed, word, "ablate-tuples"))) {
      kept.push_back(list[i]);
    }
    out.emplace(word, std::move(kept));
  }
  return out;
}

TuplesByWord ablate_words(const TuplesByWord& tuples, double percent, std::uint64_t seed) {
  check_percent(percent);
  std::vector<std::string> with_data;
  for (const auto& [word, list] : tuples) {
    if (!list.empty()) with_data.push_back(word);
  }
  const std::size_t keep = ceil_count(percent / 100.0, with_data.size());
  std::set<std::string> kept;
  for (auto i : sample_indices(with_data.size(), keep, detail::splitmix64(seed ^ 0x5eedULL))) {
    kept.insert(with_data[i]);
  }
  TuplesByWord out;
  for (const auto& [word, list] : tuples) {
    out.emplace(word, kept.count(word) ? list : std::vector<TrainingTuple>{});
  }
  return out;
}

ExampleBatch resolve_batch(const std::vector<TrainingTuple>& tuples, const Shape& shape,
                           const EmbeddingTable& nouns, const EmbeddingTable& holistic) {
  ExampleBatch batch(shape.noun_dim, shape.output_dim(), shape.num_args());
  for (const auto& t : tuples) {
    if (t.args.size() != shape.num_args()) {
      throw RejectedInput(fmt::format("tuple '{}' has {} arguments, expected {}", t.holistic_key,
                                      t.args.size(), shape.num_args()));
    }
    const Vector& a0 = nouns.at(t.args[0]);
    const Vector* a1 = shape.num_args() == 2 ? &nouns.at(t.args[1]) : nullptr;
    const Vector& z = holistic.at(t.holistic_key);
    if (a0.size() != shape.noun_dim || (a1 && a1->size() != shape.noun_dim)) {
      throw RejectedInput(fmt::format("noun vectors have dimension {}, model expects {}", a0.size(),
                                      shape.noun_dim));
    }
    if (z.size() != shape.output_dim()) {
      throw RejectedInput(fmt::format("holistic vectors have dimension {}, model expects {}",
                                      z.size(), shape.output_dim()));
    }
    batch.add(a0, a1 ? std::span<const double>(*a1) : std::span<const double>{}, z);
  }
  return batch;
}

FitResult fit(const std::vector<std::string>& vocab, const TuplesByWord& tuples,
              const NeighborGraph& graph, const EmbeddingTable& nouns,
              const EmbeddingTable& holistic, const Shape& shape, const TrainConfig& config) {
  std::vector<std::string> words = vocab;
  for (const auto& [word, list] : tuples) words.push_back(word);
  return fit_from(initialize_store(shape, words, config.seed), tuples, graph, nouns, holistic,
                  config);
}

FitResult fit_from(ParamsStore store, const TuplesByWord& tuples, const NeighborGraph& graph,
                   const EmbeddingTable& nouns, const EmbeddingTable& holistic,
                   const TrainConfig& config) {
  config.validate();
  const Shape shape = store.shape();
  if (shape.rep != config.objective.representation) {
    throw RejectedInput("configured representation does not match the parameter shape");
  }
  for (const auto& [word, list] : tuples) {
    if (!store.contains(word)) throw MissingWord(word, "has tuples but no parameters");
  }
  const std::size_t words = store.size();
  const IndexedGraph indexed = index_graph(graph, store);
  const bool use_validation = shape.kind == WordKind::verb || config.validate_adjectives;

  std::vector<WordPlan> plans(words);
  for (std::size_t w = 0; w < words; ++w) {
    WordPlan& plan = plans[w];
    auto it = tuples.find(store.word(w));
    std::vector<TrainingTuple> all = it == tuples.end() ? std::vector<TrainingTuple>{} : it->second;
    plan.alpha = config.alpha_for(all.size());
    std::vector<TrainingTuple> train = all, val;
    if (use_validation) {
      std::tie(train, val) = split_validation(all, config.validation_fraction,
                                              config.validation_min_points,
                                              word_seed(config.seed, store.word(w), "validation"));
    }
    plan.tuples = train.size();
    plan.train = resolve_batch(train, shape, nouns, holistic);
    plan.validation = resolve_batch(val, shape, nouns, holistic);
    const std::size_t bs = config.batch_size == 0 ? std::max<std::size_t>(1, plan.train.size())
                                                  : config.batch_size;
    for (std::size_t b = 0; b < plan.train.size(); b += bs) {
      plan.minibatches.push_back(plan.train.slice(b, b + bs));
    }
  }

  std::vector<AdadeltaState> states;
  states.reserve(words);
  for (std::size_t w = 0; w < words; ++w) states.emplace_back(shape.size(), config.adadelta);

  TrainReport report;
  report.words.resize(words);
  std::vector<std::vector<double>> val_history(words);
  std::vector<char> active(words, 1);
  for (std::size_t w = 0; w < words; ++w) {
    report.words[w].word = store.word(w);
    report.words[w].tuples = plans[w].tuples;
  }

  std::vector<WordObjective> train_terms(words), val_terms(words), step_terms(words);
  for (std::size_t w = 0; w < words; ++w) {
    train_terms[w] = {&plans[w].train, plans[w].alpha};
    val_terms[w] = {&plans[w].validation, plans[w].alpha};
  }
  ObjectiveConfig val_objective = config.objective;
  val_objective.beta = 0.0;
  val_objective.l2_lambda = 0.0;

  for (std::size_t epoch = 1; epoch <= config.max_iterations; ++epoch) {
    if (std::none_of(active.begin(), active.end(), [](char a) { return a != 0; })) break;
    std::size_t steps = 1;
    for (std::size_t w = 0; w < words; ++w) {
      if (active[w]) steps = std::max(steps, plans[w].minibatches.size());
    }
    for (std::size_t j = 0; j < steps; ++j) {
      for (std::size_t w = 0; w < words; ++w) {
        const auto& mb = plans[w].minibatches;
        step_terms[w] = {j < mb.size() ? &mb[j] : nullptr, plans[w].alpha};
      }
      GradientSet g = gradients(store, step_terms, indexed, config.objective, config.threads);
      for (std::size_t w = 0; w < words; ++w) {
        if (!active[w]) continue;
        const auto& mb = plans[w].minibatches;
        if (!mb.empty() && j >= mb.size()) continue;
        states[w].apply(g.grads[w], store[w].values(),
                        fmt::format("'{}' at iteration {}", store.word(w), epoch));
      }
    }

    auto train_losses = word_losses(store, train_terms, indexed, config.objective, config.threads);
    std::vector<double> val_losses;
    if (use_validation) {
      val_losses = word_losses(store, val_terms, indexed, val_objective, config.threads);
    }
    for (std::size_t w = 0; w < words; ++w) {
      if (!active[w]) continue;
      WordReport& wr = report.words[w];
      wr.iterations = epoch;
      if (!std::isfinite(train_losses[w])) {
        throw NumericalFailure(fmt::format("training loss of '{}' diverged at iteration {}",
                                           store.word(w), epoch));
      }
      wr.final_train_loss = train_losses[w];
      wr.train_loss_history.push_back(train_losses[w]);
      const bool has_val = !plans[w].validation.empty();
      if (has_val) {
        wr.final_val_loss = val_losses[w];
        val_history[w].push_back(val_losses[w]);
      }
      if (plans[w].train.empty()) continue;  // no stopping signal of its own

      const std::size_t patience = config.patience;
      const auto& hist = wr.train_loss_history;
      if (has_val && trailing_run(val_history[w], [](double a, double b) { return b > a; }) >= patience) {
        wr.stop_reason = StopReason::validation_increase;
        active[w] = 0;
      } else if (shape.kind == WordKind::adjective &&
                 trailing_run(hist, [](double a, double b) { return b > a; }) >= patience) {
        wr.stop_reason = StopReason::error_increase;
        active[w] = 0;
      } else if (trailing_run(hist, [&](double a, double b) {
                   const double improvement = a > 0.0 ? (a - b) / a : 0.0;
                   return improvement < config.stagnation_tolerance;
                 }) >= patience) {
        wr.stop_reason = StopReason::stagnation;
        active[w] = 0;
      }
    }
  }
  return {std::move(store), std::move(report)};
}

}  // namespace lexfn
