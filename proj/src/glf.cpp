#include "lexfn/glf.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lexfn/adadelta.hpp"
#include "lexfn/error.hpp"
#include "lexfn/trainer.hpp"

namespace lexfn {

GlfTensor::GlfTensor(std::size_t noun_dim, std::size_t vector_dim)
    : GlfTensor(noun_dim, vector_dim, std::vector<double>(noun_dim * noun_dim * vector_dim, 0.0)) {}

GlfTensor::GlfTensor(std::size_t noun_dim, std::size_t vector_dim, std::vector<double> values)
    : noun_dim_(noun_dim), vector_dim_(vector_dim), values_(std::move(values)) {
  if (noun_dim_ == 0 || vector_dim_ == 0) throw RejectedInput("GLF tensor dimensions must be positive");
  if (values_.size() != noun_dim_ * noun_dim_ * vector_dim_) {
    throw RejectedInput(fmt::format("GLF tensor needs {} values, got {}",
                                    noun_dim_ * noun_dim_ * vector_dim_, values_.size()));
  }
  if (!all_finite(values_)) throw RejectedInput("GLF tensor has non-finite entries");
}

DenseMatrix glf_predict(const GlfTensor& g, std::span<const double> a) {
  const std::size_t n = g.noun_dim(), d = g.vector_dim();
  if (a.size() != d) {
    throw RejectedInput(fmt::format("GLF expects {}-dimensional word vectors, got {}", d, a.size()));
  }
  std::vector<double> m(n * n);
  auto vals = g.values();
  for (std::size_t ij = 0; ij < n * n; ++ij) m[ij] = dot(vals.subspan(ij * d, d), a);
  return DenseMatrix(n, n, std::move(m));
}

namespace {

double accumulate_example(const GlfTensor& g, const GlfExample& ex, double scale,
                          std::vector<double>* grad) {
  const std::size_t n = g.noun_dim(), d = g.vector_dim();
  if (ex.word_vector.size() != d || ex.matrix.rows() != n || ex.matrix.cols() != n) {
    throw RejectedInput("GLF example does not match the tensor shape");
  }
  auto vals = g.values();
  auto target = ex.matrix.values();
  double loss = 0.0;
  for (std::size_t ij = 0; ij < n * n; ++ij) {
    const double r = dot(vals.subspan(ij * d, d), ex.word_vector) - target[ij];
    loss += r * r;
    if (grad) {
      for (std::size_t k = 0; k < d; ++k) (*grad)[ij * d + k] += scale * r * ex.word_vector[k];
    }
  }
  return 0.5 * loss;
}

}  // namespace

double glf_objective(const GlfTensor& g, std::span<const GlfExample> examples,
                     std::vector<double>* grad) {
  if (examples.empty()) throw DegenerateObjective("GLF objective needs at least one example");
  if (grad) grad->assign(g.values().size(), 0.0);
  const double scale = 1.0 / static_cast<double>(examples.size());
  double total = 0.0;
  for (const auto& ex : examples) total += accumulate_example(g, ex, scale, grad);
  return total * scale;
}

GlfFit glf_train(const std::map<std::string, DenseMatrix>& pretrained,
                 const EmbeddingTable& adj_vectors, const TrainConfig& config) {
  config.validate();
  if (pretrained.size() < 2) {
    throw RejectedInput(fmt::format("GLF needs at least 2 training adjectives, got {}",
                                    pretrained.size()));
  }
  std::vector<GlfExample> examples;
  std::size_t n = 0;
  for (const auto& [word, matrix] : pretrained) {
    const Vector& a = adj_vectors.at(word);
    if (n == 0) n = matrix.rows();
    if (matrix.rows() != n || matrix.cols() != n) {
      throw RejectedInput(fmt::format("pretrained matrix of '{}' is not {}x{}", word, n, n));
    }
    examples.push_back({a, matrix});
  }
  const std::size_t d = adj_vectors.dim();

  GlfFit fit{GlfTensor(n, d)};
  AdadeltaState state(fit.tensor.values().size(), config.adadelta);
  const std::size_t bs = config.batch_size == 0 ? examples.size() : config.batch_size;
  std::vector<double> grad;
  std::vector<double> history;
  for (std::size_t epoch = 1; epoch <= config.max_iterations; ++epoch) {
    for (std::size_t b = 0; b < examples.size(); b += bs) {
      const std::size_t e = std::min(examples.size(), b + bs);
      glf_objective(fit.tensor, std::span<const GlfExample>(examples).subspan(b, e - b), &grad);
      state.apply(grad, fit.tensor.values(), fmt::format("GLF tensor at iteration {}", epoch));
    }
    const double loss = glf_objective(fit.tensor, examples);
    if (!std::isfinite(loss)) {
      throw NumericalFailure(fmt::format("GLF loss diverged at iteration {}", epoch));
    }
    fit.iterations = epoch;
    fit.final_loss = loss;
    history.push_back(loss);
    std::size_t run = 0;
    for (std::size_t i = history.size(); i >= 2; --i) {
      const double prev = history[i - 2];
      const double improvement = prev > 0.0 ? (prev - history[i - 1]) / prev : 0.0;
      if (improvement >= config.stagnation_tolerance) break;
      ++run;
    }
    if (run >= config.patience) {
      fit.stagnated = true;
      break;
    }
  }
  return fit;
}

std::map<std::string, DenseMatrix> glf_pretrain(const TuplesByWord& tuples,
                                                const EmbeddingTable& nouns,
                                                const EmbeddingTable& holistic,
                                                std::size_t min_tuples, const TrainConfig& config) {
  TuplesByWord rich;
  for (const auto& [word, list] : tuples) {
    if (list.size() >= min_tuples) rich.emplace(word, list);
  }
  if (rich.empty()) {
    throw RejectedInput(fmt::format("no adjective has at least {} tuples", min_tuples));
  }
  TrainConfig plain = config;
  plain.objective.alpha = 0.0;
  plain.objective.beta = 0.0;
  plain.objective.representation = Representation::full;
  plain.alpha_schedule.kind = AlphaSchedule::Kind::fixed;
  NeighborGraph none;
  auto result = fit({}, rich, none, nouns, holistic, Shape::full_adjective(nouns.dim()), plain);
  std::map<std::string, DenseMatrix> out;
  for (std::size_t w = 0; w < result.params.size(); ++w) {
    out.emplace(result.params.word(w), result.params[w].to_dense_matrix());
  }
  return out;
}

}  // namespace lexfn
