#include "lexfn/adadelta.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lexfn/error.hpp"

namespace lexfn {

namespace {

void check_gradient(const AdadeltaState& state, std::span<const double> grad,
                    std::string_view label) {
  if (grad.size() != state.size()) {
    throw RejectedInput(fmt::format("gradient has {} entries, optimizer state {}", grad.size(),
                                    state.size()));
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw NumericalFailure(
          fmt::format("non-finite gradient{}{}", label.empty() ? "" : " for ", label));
    }
  }
}

}  // namespace

void AdadeltaConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw RejectedInput(fmt::format("rho {} outside (0, 1)", rho));
  if (!(epsilon > 0.0)) throw RejectedInput(fmt::format("epsilon {} must be positive", epsilon));
}

AdadeltaState::AdadeltaState(std::size_t size, AdadeltaConfig cfg)
    : config(cfg), acc_grad_sq(size, 0.0), acc_update_sq(size, 0.0) {
  config.validate();
}

void AdadeltaState::apply(std::span<const double> grad, std::span<double> params,
                          std::string_view label) {
  check_gradient(*this, grad, label);
  if (params.size() != size()) throw RejectedInput("parameter and optimizer sizes differ");
  const double rho = config.rho;
  const double eps = config.epsilon;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    acc_grad_sq[i] = rho * acc_grad_sq[i] + (1.0 - rho) * g * g;
    const double dx = -std::sqrt(acc_update_sq[i] + eps) / std::sqrt(acc_grad_sq[i] + eps) * g;
    acc_update_sq[i] = rho * acc_update_sq[i] + (1.0 - rho) * dx * dx;
    params[i] += dx;
  }
}

AdadeltaStep adadelta_step(const AdadeltaState& state, std::span<const double> grad,
                           std::string_view label) {
  AdadeltaStep out{std::vector<double>(state.size(), 0.0), state};
  out.state.apply(grad, out.update, label);
  return out;
}

}  // namespace lexfn
