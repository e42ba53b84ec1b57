#include "lexfn/config.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "lexfn/error.hpp"

namespace lexfn {

std::vector<std::pair<double, double>> parameter_grid() {
  std::vector<std::pair<double, double>> grid;
  for (double a : kAlphaGrid) {
    for (double b : kBetaGrid) grid.emplace_back(a, b);
  }
  return grid;
}

double default_l2(Representation rep) { return rep == Representation::full ? kFullTensorL2 : 0.0; }

double alpha_schedule_var(std::size_t m, double alpha_max, std::size_t m_full) {
  if (m_full == 0) throw RejectedInput("m_full must be at least 1");
  const double ratio = std::min(1.0, static_cast<double>(m) / static_cast<double>(m_full));
  return alpha_max * ratio;
}

void TrainConfig::validate() const {
  objective.validate();
  adadelta.validate();
  if (max_iterations == 0) throw RejectedInput("max_iterations must be at least 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw RejectedInput(fmt::format("validation fraction {} outside [0, 1)", validation_fraction));
  }
  if (validation_min_points == 0) throw RejectedInput("validation_min_points must be positive");
  if (patience == 0) throw RejectedInput("patience must be positive");
  if (!(stagnation_tolerance > 0.0)) throw RejectedInput("stagnation tolerance must be positive");
  if (threads == 0) throw RejectedInput("threads must be at least 1");
  if (alpha_schedule.kind == AlphaSchedule::Kind::var) {
    if (!(alpha_schedule.alpha_max >= 0.0 && alpha_schedule.alpha_max <= 1.0)) {
      throw RejectedInput("alpha_max outside [0, 1]");
    }
    if (alpha_schedule.m_full == 0) throw RejectedInput("m_full must be at least 1");
  }
}

double TrainConfig::alpha_for(std::size_t m) const {
  if (alpha_schedule.kind == AlphaSchedule::Kind::fixed) return objective.alpha;
  return alpha_schedule_var(m, alpha_schedule.alpha_max, alpha_schedule.m_full);
}

std::string TrainConfig::describe() const {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{}={}\n", key, value);
  };
  line("max_iterations", max_iterations);
  line("representation", to_string(objective.representation));
  line("alpha_schedule", alpha_schedule.kind == AlphaSchedule::Kind::fixed ? "fixed" : "var");
  line("alpha", objective.alpha);
  line("alpha_max", alpha_schedule.alpha_max);
  line("m_full", alpha_schedule.m_full);
  line("beta", objective.beta);
  line("k", objective.k);
  line("l2", objective.l2_lambda);
  line("divide_by_actual_neighbors", objective.divide_by_actual_neighbors);
  line("validation_fraction", validation_fraction);
  line("validation_min_points", validation_min_points);
  line("validate_adjectives", validate_adjectives);
  line("patience", patience);
  line("stagnation_tolerance", stagnation_tolerance);
  line("batch_size", batch_size);
  line("seed", seed);
  line("adadelta_rho", adadelta.rho);
  line("adadelta_epsilon", adadelta.epsilon);
  return out;
}

TrainConfig default_train_config(Representation rep) {
  TrainConfig config;
  config.objective.representation = rep;
  config.objective.l2_lambda = default_l2(rep);
  return config;
}

const std::array<Preset, 4>& presets() {
  static const std::array<Preset, 4> table{{
      {"fix1", 0.9, 0.01, AlphaSchedule::Kind::fixed},
      {"fix2", 0.0, 0.1, AlphaSchedule::Kind::fixed},
      {"fix3", 0.1, 0.1, AlphaSchedule::Kind::fixed},
      {"var", 0.9, 0.01, AlphaSchedule::Kind::var},
  }};
  return table;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw UsageError(fmt::format("unknown preset '{}' (expected fix1, fix2, fix3 or var)", name));
}

void apply_preset(TrainConfig& config, const Preset& preset) {
  config.objective.beta = preset.beta;
  config.alpha_schedule.kind = preset.schedule;
  if (preset.schedule == AlphaSchedule::Kind::fixed) {
    config.objective.alpha = preset.alpha;
  } else {
    config.alpha_schedule.alpha_max = preset.alpha;
    config.objective.alpha = 0.0;
  }
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace lexfn
