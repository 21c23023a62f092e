#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latomo/geometry.hpp"
#include "latomo/noise.hpp"
#include "latomo/phantom.hpp"
#include "latomo/recon.hpp"

namespace latomo {

/// A configuration problem the user can fix; the message names the field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat "section.key" -> value view of a `key = value` config with [sections].
using ConfigMap = std::map<std::string, std::string>;

/// Every recognised key with its default value.
ConfigMap default_config();

/// Parses config text on top of `base`. Unknown keys and malformed lines raise
/// ValidationError with the line number.
ConfigMap parse_config(const std::string& text, ConfigMap base = default_config());

/// Applies one `section.key=value` override.
void apply_override(ConfigMap& config, const std::string& assignment);

/// Desk-scale preset: 256 x 256 grid of 0.75 mm pixels, 200 iterations.
void apply_desk_preset(ConfigMap& config);

/// Canonical text form; parsing it yields the same map.
std::string format_config(const ConfigMap& config);

struct Window {
  double lo = 0.0;
  double hi = 100.0;
};

struct ExperimentConfig {
  std::string phantom = "builtin";  // `builtin` or a spec file path
  std::size_t width = 512;
  std::size_t height = 512;
  double pixel_size = 0.5;
  FanBeamGeometry geometry{};
  std::optional<NoiseSpec> noise;
  std::vector<Algorithm> algorithms;
  ReconConfig recon{};
  std::optional<RoiMm> roi;  // overrides the phantom's published ROI
  Window image_window{0.0, 100.0};
  Window difference_window{-25.0, 25.0};
  Window bars_window{0.0, 800.0};
  std::filesystem::path output_dir = "latomo_out";
};

/// Typed view of a ConfigMap; relative paths resolve against `base_dir`.
/// Throws ValidationError naming the offending field.
ExperimentConfig resolve_config(const ConfigMap& config,
                                const std::filesystem::path& base_dir = {});

ConfigMap load_config(const std::filesystem::path& path);

struct ExperimentSummary {
  std::filesystem::path output_dir;
  std::vector<std::pair<Algorithm, double>> final_roi_rmse_hu;
};

/// Phantom -> sinogram -> optional noise -> reconstructions. Writes ground
/// truth, sinograms, reconstructions, difference images, PGM previews,
/// convergence CSVs and the resolved config (config.ini) into the output dir.
ExperimentSummary run_experiment(const ConfigMap& config,
                                 const std::filesystem::path& base_dir = {});
ExperimentSummary run_experiment(const std::filesystem::path& config_path,
                                 const std::vector<std::string>& overrides = {},
                                 bool desk = false);

struct MergedLogs {
  std::string csv;
  std::vector<std::string> warnings;
};

/// Merges the roi_rmse_hu column of several convergence CSVs into one table
/// keyed by iteration; shorter logs are padded with empty cells.
MergedLogs compare_runs(const std::vector<std::filesystem::path>& log_paths);

/// Builds the phantom named by an ExperimentConfig (`builtin` or a file).
PhantomSpec load_phantom(const std::string& phantom);

}  // namespace latomo
