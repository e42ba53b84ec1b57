#include "lexfn/objectives.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lexfn/error.hpp"
#include "parallel.hpp"

namespace lexfn {

namespace {

// Below this Frobenius distance the fitting subgradient is taken as 0.
constexpr double kCoincidentDistance = 1e-12;

struct Scratch {
  Vector out;
  Vector rank_a;  // V n, or Q s
  Vector rank_b;  // R o
  Vector residual;
};

Scratch make_scratch(const Shape& shape) {
  return {Vector(shape.output_dim()), Vector(shape.rank), Vector(shape.rank),
          Vector(shape.output_dim())};
}

std::span<const double> block_of(const Shape& shape, std::span<const double> values, std::size_t b) {
  return values.subspan(shape.block_offset(b), shape.block_size(b));
}

void forward(const Shape& shape, std::span<const double> values, std::span<const double> a0,
             std::span<const double> a1, Scratch& scratch) {
  const std::size_t n = shape.noun_dim;
  if (shape.rep == Representation::full) {
    if (shape.kind == WordKind::adjective) {
      kernels::matvec(values, n, n, a0, scratch.out);
    } else {
      kernels::bilinear(values, shape.sentence_dim, n, a0, a1, scratch.out);
    }
  } else if (shape.kind == WordKind::adjective) {
    kernels::lowrank_matrix(block_of(shape, values, 0), block_of(shape, values, 1), shape.rank, n,
                            a0, scratch.rank_a, scratch.out);
  } else {
    kernels::lowrank_tensor3(block_of(shape, values, 0), block_of(shape, values, 1),
                             block_of(shape, values, 2), shape.rank, shape.sentence_dim, n, a0, a1,
                             scratch.rank_a, scratch.rank_b, scratch.out);
  }
}

/// Fills scratch.residual and returns 1/2 ||r||^2.
double residual_loss(const Shape& shape, std::span<const double> values, std::span<const double> a0,
                     std::span<const double> a1, std::span<const double> z, Scratch& scratch) {
  forward(shape, values, a0, a1, scratch);
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = scratch.out[i] - z[i];
    scratch.residual[i] = r;
    acc += r * r;
  }
  return 0.5 * acc;
}

/// grad += weight * d(1/2 ||r||^2)/d(values), using the intermediates left in
/// scratch by the preceding residual_loss call.
void accumulate_gradient(const Shape& shape, std::span<const double> values,
                         std::span<const double> a0, std::span<const double> a1,
                         const Scratch& scratch, double weight, std::span<double> grad) {
  const std::size_t n = shape.noun_dim;
  const auto& r = scratch.residual;
  if (shape.rep == Representation::full) {
    if (shape.kind == WordKind::adjective) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ri = weight * r[i];
        double* row = grad.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += ri * a0[j];
      }
    } else {
      for (std::size_t k = 0; k < shape.sentence_dim; ++k) {
        const double rk = weight * r[k];
        for (std::size_t i = 0; i < n; ++i) {
          const double rs = rk * a0[i];
          double* row = grad.data() + (k * n + i) * n;
          for (std::size_t j = 0; j < n; ++j) row[j] += rs * a1[j];
        }
      }
    }
    return;
  }
  const std::size_t rank = shape.rank;
  if (shape.kind == WordKind::adjective) {
    auto u = block_of(shape, values, 0);
    double* du = grad.data() + shape.block_offset(0);
    double* dv = grad.data() + shape.block_offset(1);
    for (std::size_t c = 0; c < rank; ++c) {
      const double t = weight * scratch.rank_a[c];
      double ur = 0.0;
      for (std::size_t i = 0; i < n; ++i) ur += u[c * n + i] * r[i];
      ur *= weight;
      for (std::size_t i = 0; i < n; ++i) {
        du[c * n + i] += t * r[i];
        dv[c * n + i] += ur * a0[i];
      }
    }
    return;
  }
  const std::size_t sdim = shape.sentence_dim;
  auto p = block_of(shape, values, 0);
  double* dp = grad.data() + shape.block_offset(0);
  double* dq = grad.data() + shape.block_offset(1);
  double* dr = grad.data() + shape.block_offset(2);
  for (std::size_t c = 0; c < rank; ++c) {
    const double qs = scratch.rank_a[c];
    const double ro = scratch.rank_b[c];
    const double prod = weight * qs * ro;
    double pr = 0.0;
    for (std::size_t k = 0; k < sdim; ++k) pr += p[c * sdim + k] * r[k];
    pr *= weight;
    for (std::size_t k = 0; k < sdim; ++k) dp[c * sdim + k] += prod * r[k];
    const double gq = pr * ro;
    const double gr = pr * qs;
    for (std::size_t i = 0; i < n; ++i) {
      dq[c * n + i] += gq * a0[i];
      dr[c * n + i] += gr * a1[i];
    }
  }
}

void require_aligned(const Params& self, std::span<const WeightedParams> neighbors) {
  for (const auto& nb : neighbors) {
    if (nb.params == nullptr || !(nb.params->shape() == self.shape())) {
      throw RejectedInput("neighbor parameters do not match the word's shape");
    }
  }
}

void blend_into(const Params& self, std::span<const WeightedParams> neighbors, double alpha,
                double k, std::span<double> out) {
  auto t = self.values();
  if (alpha == 0.0) {
    std::copy(t.begin(), t.end(), out.begin());
    return;
  }
  const double keep = 1.0 - alpha;
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = keep * t[i];
  for (const auto& nb : neighbors) {
    const double c = alpha * nb.phi / k;
    auto ti = nb.params->values();
    for (std::size_t i = 0; i < t.size(); ++i) out[i] += c * ti[i];
  }
}

struct WordTerms {
  double loss = 0.0;
  bool has_data = false;
  std::vector<double> d_effective;  // d(mean data loss)/d(effective params)
  std::vector<double> ft_coef;      // per (neighbor, block)
};

WordTerms evaluate_word(const Params& self, const ExampleBatch* batch,
                        std::span<const WeightedParams> neighbors, double alpha,
                        const ObjectiveConfig& config, bool want_grad) {
  const Shape& shape = self.shape();
  WordTerms out;
  const double k = config.divisor(neighbors.size());
  out.has_data = batch != nullptr && !batch->empty();
  if (out.has_data) {
    if (batch->noun_dim() != shape.noun_dim || batch->output_dim() != shape.output_dim() ||
        batch->num_args() != shape.num_args()) {
      throw RejectedInput("example batch does not match the parameter shape");
    }
    std::vector<double> effective(shape.size());
    blend_into(self, neighbors, alpha, k, effective);
    Scratch scratch = make_scratch(shape);
    const double weight = 1.0 / static_cast<double>(batch->size());
    if (want_grad) out.d_effective.assign(shape.size(), 0.0);
    double data = 0.0;
    for (std::size_t e = 0; e < batch->size(); ++e) {
      auto a0 = batch->arg0(e);
      auto a1 = batch->arg1(e);
      data += residual_loss(shape, effective, a0, a1, batch->target(e), scratch);
      if (want_grad) accumulate_gradient(shape, effective, a0, a1, scratch, weight, out.d_effective);
    }
    out.loss = data * weight;
  }
  if (config.beta != 0.0) {
    const std::size_t blocks = shape.num_blocks();
    if (want_grad) out.ft_coef.assign(neighbors.size() * blocks, 0.0);
    const double scale = config.beta / k;
    double weighted = 0.0;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      double dist_sum = 0.0;
      for (std::size_t b = 0; b < blocks; ++b) {
        const double dist = frobenius_distance(self.block(b), neighbors[i].params->block(b));
        dist_sum += dist;
        if (want_grad && dist > kCoincidentDistance) {
          out.ft_coef[i * blocks + b] = scale * neighbors[i].phi / dist;
        }
      }
      weighted += neighbors[i].phi * dist_sum;
    }
    out.loss += scale * weighted;
  }
  if (out.has_data && shape.rep == Representation::full && config.l2_lambda != 0.0) {
    out.loss += config.l2_lambda * squared_norm(self.values());
  }
  return out;
}

bool has_terms(const WordObjective& term, const ObjectiveConfig& config) {
  return (term.batch != nullptr && !term.batch->empty()) || config.beta != 0.0;
}

std::vector<WeightedParams> neighbor_params(const ParamsStore& store,
                                            const std::vector<IndexedNeighbor>& list) {
  std::vector<WeightedParams> out;
  out.reserve(list.size());
  for (const auto& nb : list) out.push_back({&store[nb.index], nb.phi});
  return out;
}

}  // namespace

void ObjectiveConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw RejectedInput(fmt::format("alpha {} outside [0, 1]", alpha));
  if (!(beta >= 0.0)) throw RejectedInput(fmt::format("beta {} must be >= 0", beta));
  if (!(l2_lambda >= 0.0)) throw RejectedInput(fmt::format("l2 {} must be >= 0", l2_lambda));
  if (k == 0) throw RejectedInput("k must be at least 1");
}

double ObjectiveConfig::divisor(std::size_t actual_neighbors) const {
  if (divide_by_actual_neighbors) return static_cast<double>(std::max<std::size_t>(1, actual_neighbors));
  return static_cast<double>(k);
}

ExampleBatch::ExampleBatch(std::size_t noun_dim, std::size_t output_dim, std::size_t num_args)
    : noun_dim_(noun_dim), output_dim_(output_dim), num_args_(num_args) {
  if (num_args != 1 && num_args != 2) throw RejectedInput("examples take one or two arguments");
}

void ExampleBatch::add(std::span<const double> arg0, std::span<const double> arg1,
                       std::span<const double> target) {
  if (arg0.size() != noun_dim_ || (num_args_ == 2 && arg1.size() != noun_dim_) ||
      target.size() != output_dim_) {
    throw RejectedInput("example vectors do not match the batch dimensions");
  }
  args0_.insert(args0_.end(), arg0.begin(), arg0.end());
  if (num_args_ == 2) args1_.insert(args1_.end(), arg1.begin(), arg1.end());
  targets_.insert(targets_.end(), target.begin(), target.end());
  ++count_;
}

std::span<const double> ExampleBatch::arg0(std::size_t i) const {
  return std::span<const double>(args0_).subspan(i * noun_dim_, noun_dim_);
}

std::span<const double> ExampleBatch::arg1(std::size_t i) const {
  if (num_args_ == 1) return {};
  return std::span<const double>(args1_).subspan(i * noun_dim_, noun_dim_);
}

std::span<const double> ExampleBatch::target(std::size_t i) const {
  return std::span<const double>(targets_).subspan(i * output_dim_, output_dim_);
}

ExampleBatch ExampleBatch::slice(std::size_t begin, std::size_t end) const {
  ExampleBatch out(noun_dim_, output_dim_, num_args_);
  end = std::min(end, count_);
  for (std::size_t i = begin; i < end; ++i) out.add(arg0(i), arg1(i), target(i));
  return out;
}

double adj_example_loss(const Params& a, std::span<const double> n, std::span<const double> z) {
  if (a.shape().kind != WordKind::adjective) throw RejectedInput("expected adjective parameters");
  if (n.size() != a.shape().noun_dim || z.size() != a.shape().output_dim()) {
    throw RejectedInput("adjective example dimensions do not match");
  }
  Scratch scratch = make_scratch(a.shape());
  return residual_loss(a.shape(), a.values(), n, {}, z, scratch);
}

double verb_example_loss(const Params& v, std::span<const double> s, std::span<const double> o,
                         std::span<const double> z) {
  if (v.shape().kind != WordKind::verb) throw RejectedInput("expected verb parameters");
  const auto& shape = v.shape();
  if (s.size() != shape.noun_dim || o.size() != shape.noun_dim || z.size() != shape.output_dim()) {
    throw RejectedInput("verb example dimensions do not match");
  }
  Scratch scratch = make_scratch(shape);
  return residual_loss(shape, v.values(), s, o, z, scratch);
}

double residual_norm(const Params& t, std::span<const double> arg0, std::span<const double> arg1,
                     std::span<const double> z) {
  Vector out = t.apply(arg0, arg1);
  if (z.size() != out.size()) throw RejectedInput("target dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) acc += (out[i] - z[i]) * (out[i] - z[i]);
  return std::sqrt(acc);
}

Params ps_effective_params(const Params& self, std::span<const WeightedParams> neighbors,
                           double alpha, double k) {
  require_aligned(self, neighbors);
  if (!(k > 0.0)) throw RejectedInput("neighbor divisor must be positive");
  std::vector<double> out(self.shape().size());
  blend_into(self, neighbors, alpha, k, out);
  return Params(self.shape(), std::move(out));
}

double ps_example_loss(const Params& self, std::span<const WeightedParams> neighbors, double alpha,
                       double k, std::span<const double> arg0, std::span<const double> arg1,
                       std::span<const double> z) {
  Params effective = ps_effective_params(self, neighbors, alpha, k);
  if (self.shape().kind == WordKind::adjective) return adj_example_loss(effective, arg0, z);
  return verb_example_loss(effective, arg0, arg1, z);
}

double ft_penalty(const Params& self, std::span<const WeightedParams> neighbors, double beta,
                  double k) {
  require_aligned(self, neighbors);
  if (beta == 0.0) return 0.0;
  double weighted = 0.0;
  for (const auto& nb : neighbors) {
    double dist_sum = 0.0;
    for (std::size_t b = 0; b < self.shape().num_blocks(); ++b) {
      dist_sum += frobenius_distance(self.block(b), nb.params->block(b));
    }
    weighted += nb.phi * dist_sum;
  }
  return beta / k * weighted;
}

double combined_loss(const Params& self, const ExampleBatch& batch,
                     std::span<const WeightedParams> neighbors, const ObjectiveConfig& config) {
  config.validate();
  require_aligned(self, neighbors);
  if (batch.empty() && config.beta == 0.0) {
    throw DegenerateObjective("empty batch with beta = 0 leaves nothing to optimize");
  }
  return evaluate_word(self, &batch, neighbors, config.alpha, config, false).loss;
}

IndexedGraph index_graph(const NeighborGraph& graph, const ParamsStore& store) {
  IndexedGraph out(store.size());
  for (std::size_t w = 0; w < store.size(); ++w) {
    for (const auto& nb : graph.neighbors_of(store.word(w))) {
      if (!store.contains(nb.word)) throw MissingWord(nb.word, "neighbor of " + store.word(w));
      out[w].push_back({store.index_of(nb.word), nb.phi});
    }
  }
  return out;
}

GradientSet gradients(const ParamsStore& store, std::span<const WordObjective> terms,
                      const IndexedGraph& graph, const ObjectiveConfig& config, std::size_t threads) {
  config.validate();
  const std::size_t words = store.size();
  if (terms.size() != words || graph.size() != words) {
    throw RejectedInput("objective terms and graph must cover every stored word");
  }
  const Shape& shape = store.shape();
  const std::size_t blocks = shape.num_blocks();

  // Phase 1: per-word terms against the (read-only) store.
  std::vector<WordTerms> local(words);
  std::vector<char> active(words, 0);
  detail::parallel_for(words, threads, [&](std::size_t w) {
    if (!has_terms(terms[w], config)) return;
    active[w] = 1;
    auto nbs = neighbor_params(store, graph[w]);
    local[w] = evaluate_word(store[w], terms[w].batch, nbs, terms[w].alpha, config, true);
  });

  // Who reaches each destination word, in ascending source order.
  struct Incoming {
    std::size_t source;
    std::size_t slot;  // position in source's neighbor list
  };
  std::vector<std::vector<Incoming>> incoming(words);
  for (std::size_t w = 0; w < words; ++w) {
    if (!active[w]) continue;
    for (std::size_t i = 0; i < graph[w].size(); ++i) incoming[graph[w][i].index].push_back({w, i});
  }

  GradientSet result;
  result.grads.assign(words, {});
  result.word_loss.assign(words, 0.0);

  // Phase 2: each destination sums its contributions in a fixed order.
  detail::parallel_for(words, threads, [&](std::size_t d) {
    std::vector<double>& g = result.grads[d];
    g.assign(shape.size(), 0.0);
    auto td = store[d].values();
    auto add_self = [&] {
      const WordTerms& t = local[d];
      if (t.has_data) {
        const double keep = terms[d].alpha == 0.0 ? 1.0 : 1.0 - terms[d].alpha;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += keep * t.d_effective[i];
        if (shape.rep == Representation::full && config.l2_lambda != 0.0) {
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * config.l2_lambda * td[i];
        }
      }
      if (!t.ft_coef.empty()) {
        for (std::size_t i = 0; i < graph[d].size(); ++i) {
          const auto& tn = store[graph[d][i].index];
          for (std::size_t b = 0; b < blocks; ++b) {
            const double c = t.ft_coef[i * blocks + b];
            if (c == 0.0) continue;
            auto mine = store[d].block(b);
            auto theirs = tn.block(b);
            const std::size_t off = shape.block_offset(b);
            for (std::size_t j = 0; j < mine.size(); ++j) g[off + j] += c * (mine[j] - theirs[j]);
          }
        }
      }
    };
    bool self_done = !active[d];
    for (const auto& in : incoming[d]) {
      if (!self_done && in.source >= d) {
        add_self();
        self_done = true;
      }
      const WordTerms& t = local[in.source];
      const double alpha = terms[in.source].alpha;
      if (t.has_data && alpha != 0.0) {
        const double k = config.divisor(graph[in.source].size());
        const double c = alpha * graph[in.source][in.slot].phi / k;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * t.d_effective[i];
      }
      if (!t.ft_coef.empty()) {
        const auto& ts = store[in.source];
        for (std::size_t b = 0; b < blocks; ++b) {
          const double c = t.ft_coef[in.slot * blocks + b];
          if (c == 0.0) continue;
          auto src = ts.block(b);
          auto mine = store[d].block(b);
          const std::size_t off = shape.block_offset(b);
          for (std::size_t j = 0; j < mine.size(); ++j) g[off + j] -= c * (src[j] - mine[j]);
        }
      }
    }
    if (!self_done) add_self();
  });

  for (std::size_t w = 0; w < words; ++w) {
    result.word_loss[w] = local[w].loss;
    result.total += local[w].loss;
  }
  return result;
}

std::vector<double> word_losses(const ParamsStore& store, std::span<const WordObjective> terms,
                                const IndexedGraph& graph, const ObjectiveConfig& config,
                                std::size_t threads) {
  config.validate();
  if (terms.size() != store.size() || graph.size() != store.size()) {
    throw RejectedInput("objective terms and graph must cover every stored word");
  }
  std::vector<double> out(store.size(), 0.0);
  detail::parallel_for(store.size(), threads, [&](std::size_t w) {
    if (!has_terms(terms[w], config)) return;
    auto nbs = neighbor_params(store, graph[w]);
    out[w] = evaluate_word(store[w], terms[w].batch, nbs, terms[w].alpha, config, false).loss;
  });
  return out;
}

double total_objective(const ParamsStore& store, std::span<const WordObjective> terms,
                       const IndexedGraph& graph, const ObjectiveConfig& config) {
  double total = 0.0;
  for (double loss : word_losses(store, terms, graph, config)) total += loss;
  return total;
}

}  // namespace lexfn
