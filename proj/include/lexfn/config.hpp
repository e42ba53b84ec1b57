#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexfn/adadelta.hpp"
#include "lexfn/objectives.hpp"

namespace lexfn {

/// Grid used when tuning the sharing and fitting strengths.
inline constexpr std::array<double, 5> kAlphaGrid{0.0, 0.1, 0.5, 0.9, 1.0};
inline constexpr std::array<double, 4> kBetaGrid{0.0, 0.01, 0.05, 0.1};

/// Every (alpha, beta) pair of the tuning grid, alpha-major.
std::vector<std::pair<double, double>> parameter_grid();

/// l2 strength used for full tensors; low-rank tensors train unregularized.
inline constexpr double kFullTensorL2 = 0.1;
double default_l2(Representation rep);

struct AlphaSchedule {
  enum class Kind { fixed, var };
  Kind kind = Kind::fixed;
  double alpha_max = 0.9;
  std::size_t m_full = 500;
};

/// alpha_max * min(1, m / m_full).
double alpha_schedule_var(std::size_t m, double alpha_max, std::size_t m_full);

struct TrainConfig {
  std::size_t max_iterations = 200;
  ObjectiveConfig objective{.l2_lambda = kFullTensorL2};
  AlphaSchedule alpha_schedule;
  double validation_fraction = 0.10;
  std::size_t validation_min_points = 20;
  /// Held-out validation is used for verbs; adjectives stop on training error.
  bool validate_adjectives = false;
  std::size_t patience = 5;
  double stagnation_tolerance = 1e-4;
  /// Examples per ADADELTA step; 0 takes the whole training set in one step.
  std::size_t batch_size = 50;
  std::uint64_t seed = 0;
  AdadeltaConfig adadelta;
  /// Intra-epoch parallelism; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
  /// Sharing strength for a word with m training tuples.
  double alpha_for(std::size_t m) const;
  /// Canonical `key=value` lines of every setting that affects results.
  std::string describe() const;
};

/// Defaults for a representation (l2 = 0.1 full, 0 low-rank).
TrainConfig default_train_config(Representation rep);

struct Preset {
  std::string_view name;
  double alpha;
  double beta;
  AlphaSchedule::Kind schedule;
};

/// fix1 (0.9, 0.01), fix2 (0, 0.1), fix3 (0.1, 0.1), var (alpha ramped to 0.9, beta 0.01).
const std::array<Preset, 4>& presets();
const Preset& find_preset(std::string_view name);
void apply_preset(TrainConfig& config, const Preset& preset);

/// 64-bit FNV-1a, used for seeds and archive digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace lexfn
