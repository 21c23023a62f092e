#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latomo/image.hpp"
#include "latomo/projector.hpp"
#include "latomo/tv.hpp"

namespace latomo {

enum class Algorithm { sart, wtv, ssatv1, ssatv2 };

std::string_view to_string(Algorithm a);
/// Throws std::invalid_argument for unknown names.
Algorithm parse_algorithm(std::string_view name);

struct ScaleStep {
  int scale = 1;  // power of two
  int steps = 0;  // inner descent steps at this scale
};

/// Coarse-to-fine scales with their step budgets.
struct ScaleSchedule {
  std::vector<ScaleStep> levels;

  int total_steps() const;
  /// Throws std::invalid_argument if scales are not distinct, strictly
  /// decreasing powers of two ending at 1, or budgets are negative.
  void validate() const;
};

/// Default budgets for l_max = 1..5 with M = 10:
///   1: (1,10)  2: (2,5)(1,5)  3: (4,4)(2,3)(1,3)
///   4: (8,2)(4,2)(2,3)(1,3)  5: (16,2)(8,2)(4,2)(2,2)(1,2)
ScaleSchedule make_scale_schedule(int l_max);

/// Custom budgets listed coarse-to-fine (budgets[0] belongs to scale 2^(l_max-1)).
/// Throws std::invalid_argument mentioning `budget` if the sum differs from
/// total_steps.
ScaleSchedule make_scale_schedule(int l_max, const std::vector<int>& budgets,
                                  int total_steps);

struct ReconConfig {
  Algorithm algorithm = Algorithm::wtv;
  double lambda = 0.8;       // SART relaxation
  double eps_hu = 5.0;
  int total_steps = 10;      // M
  int l_max = 1;
  std::vector<int> budget;   // optional, coarse-to-fine
  LineSearchParams line_search{};
  int iterations = 500;      // N
  bool log_wall_time = true;

  /// Throws std::invalid_argument naming the field.
  void validate() const;
  ScaleSchedule schedule() const;
};

struct ConvergenceRow {
  int iter = 0;                       // 1-based
  std::optional<double> roi_rmse_hu;  // when a reference was supplied
  std::optional<double> full_rmse_hu;
  std::optional<double> objective;    // last regularization pass, frozen weights
  int steps_accepted = 0;
  double wall_ms = 0.0;
  double min_value = 0.0;             // min(f) after the iteration, mm^-1
  bool objective_monotone = true;     // every pass kept its frozen objective non-increasing
};

struct ConvergenceLog {
  std::vector<ConvergenceRow> rows;

  static constexpr std::string_view kHeader =
      "iter,roi_rmse_hu,full_rmse_hu,objective,steps_accepted,wall_ms";
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Ground truth for per-iteration error metrics.
struct ReconReference {
  ImageGrid image;
  RoiRect roi;
};

struct ReconResult {
  ImageGrid image;
  ConvergenceLog log;
};

using IterationCallback = std::function<void(const ConvergenceRow&, const ImageGrid&)>;

/// SART with optional TV-type regularization, starting from the zero image.
/// Each outer iteration runs one sequential SART sweep, clamps to nonnegative
/// values, applies the configured regularizer (all scales coarse-to-fine for
/// the scale-space variants) and clamps again.
ReconResult run_reconstruction(const ReconConfig& config, const FanBeamProjector& projector,
                               const Sinogram& sinogram,
                               const std::optional<ReconReference>& reference = std::nullopt,
                               const IterationCallback& on_iteration = {});

/// One regularization pass of the configured algorithm on `f` (no SART).
/// Returns the regularized image; `row` receives objective/step bookkeeping.
ImageGrid regularize_once(const ReconConfig& config, const ScaleSchedule& schedule,
                          const ImageGrid& f, ConvergenceRow& row);

}  // namespace latomo
