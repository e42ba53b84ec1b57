#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lexfn {

struct AdadeltaConfig {
  double rho = 0.95;
  double epsilon = 1e-6;

  void validate() const;
};

/// Running averages E[g^2] and E[dx^2], one pair per parameter.
struct AdadeltaState {
  AdadeltaConfig config;
  std::vector<double> acc_grad_sq;
  std::vector<double> acc_update_sq;

  AdadeltaState() = default;
  AdadeltaState(std::size_t size, AdadeltaConfig config);

  std::size_t size() const noexcept { return acc_grad_sq.size(); }

  /// Advances the averages and adds the update to `params` in place.
  /// Throws NumericalFailure (mentioning `label`) on a non-finite gradient.
  void apply(std::span<const double> grad, std::span<double> params, std::string_view label = {});

  bool operator==(const AdadeltaState&) const = default;
};

struct AdadeltaStep {
  std::vector<double> update;
  AdadeltaState state;
};

/// One ADADELTA step without touching parameters:
///   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
///   dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
AdadeltaStep adadelta_step(const AdadeltaState& state, std::span<const double> grad,
                           std::string_view label = {});

}  // namespace lexfn
