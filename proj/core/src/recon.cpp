#include "latomo/recon.hpp"

#include <chrono>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "latomo/metrics.hpp"
#include "latomo/sart.hpp"
#include "latomo/ssatv1.hpp"
#include "latomo/ssatv2.hpp"

namespace latomo {
namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

bool pass_monotone(const RegularizeStats& s) {
  double prev = s.objective_before;
  for (double v : s.objective_trace) {
    if (v > prev) return false;
    prev = v;
  }
  return true;
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sart: return "sart";
    case Algorithm::wtv: return "wtv";
    case Algorithm::ssatv1: return "ssatv1";
    case Algorithm::ssatv2: return "ssatv2";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::sart, Algorithm::wtv, Algorithm::ssatv1, Algorithm::ssatv2}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected sart, wtv, ssatv1 or ssatv2)");
}

int ScaleSchedule::total_steps() const {
  return std::accumulate(levels.begin(), levels.end(), 0,
                         [](int acc, const ScaleStep& l) { return acc + l.steps; });
}

void ScaleSchedule::validate() const {
  if (levels.empty()) throw std::invalid_argument("scale schedule is empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!is_power_of_two(levels[i].scale)) {
      throw std::invalid_argument("scale schedule: scales must be powers of two");
    }
    if (levels[i].steps < 0) throw std::invalid_argument("scale schedule: negative budget");
    if (i > 0 && levels[i].scale >= levels[i - 1].scale) {
      throw std::invalid_argument("scale schedule: scales must strictly decrease");
    }
  }
  if (levels.back().scale != 1) {
    throw std::invalid_argument("scale schedule: last scale must be 1");
  }
}

ScaleSchedule make_scale_schedule(int l_max) {
  switch (l_max) {
    case 1: return {{{1, 10}}};
    case 2: return {{{2, 5}, {1, 5}}};
    case 3: return {{{4, 4}, {2, 3}, {1, 3}}};
    case 4: return {{{8, 2}, {4, 2}, {2, 3}, {1, 3}}};
    case 5: return {{{16, 2}, {8, 2}, {4, 2}, {2, 2}, {1, 2}}};
    default:
      throw std::invalid_argument("l_max must be between 1 and 5");
  }
}

ScaleSchedule make_scale_schedule(int l_max, const std::vector<int>& budgets,
                                  int total_steps) {
  if (l_max < 1 || l_max > 5) throw std::invalid_argument("l_max must be between 1 and 5");
  if (budgets.size() != static_cast<std::size_t>(l_max)) {
    throw std::invalid_argument("recon.budget must list l_max = " + std::to_string(l_max) +
                                " entries, got " + std::to_string(budgets.size()));
  }
  ScaleSchedule sched;
  for (int l = 0; l < l_max; ++l) {
    sched.levels.push_back({1 << (l_max - 1 - l), budgets[static_cast<std::size_t>(l)]});
  }
  sched.validate();
  if (sched.total_steps() != total_steps) {
    throw std::invalid_argument("recon.budget sums to " + std::to_string(sched.total_steps()) +
                                " but recon.M is " + std::to_string(total_steps));
  }
  return sched;
}

void ReconConfig::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("recon.lambda must satisfy 0 < lambda <= 1");
  }
  if (!(eps_hu > 0.0)) throw std::invalid_argument("recon.eps must be > 0");
  if (iterations < 1) throw std::invalid_argument("recon.iterations must be >= 1");
  if (total_steps < 1) throw std::invalid_argument("recon.M must be >= 1");
  line_search.validate();
  if (algorithm == Algorithm::ssatv1 || algorithm == Algorithm::ssatv2) schedule();
}

ScaleSchedule ReconConfig::schedule() const {
  if (algorithm == Algorithm::wtv || algorithm == Algorithm::sart) {
    return {{{1, total_steps}}};
  }
  if (!budget.empty()) return make_scale_schedule(l_max, budget, total_steps);
  if (l_max == 1) return {{{1, total_steps}}};
  ScaleSchedule sched = make_scale_schedule(l_max);
  if (sched.total_steps() != total_steps) {
    throw std::invalid_argument("recon.budget is required when recon.M (" +
                                std::to_string(total_steps) +
                                ") differs from the default total of 10");
  }
  return sched;
}

std::string ConvergenceLog::to_csv() const {
  std::ostringstream out;
  out << kHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.iter << ',' << opt(r.roi_rmse_hu) << ',' << opt(r.full_rmse_hu) << ','
        << opt(r.objective) << ',' << r.steps_accepted << ',' << num(r.wall_ms) << '\n';
  }
  return out.str();
}

void ConvergenceLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ImageGrid regularize_once(const ReconConfig& config, const ScaleSchedule& schedule,
                          const ImageGrid& f, ConvergenceRow& row) {
  auto record = [&](const RegularizeStats& s) {
    row.objective = s.objective_after;
    row.steps_accepted += s.steps_accepted();
    row.objective_monotone = row.objective_monotone && pass_monotone(s);
  };
  switch (config.algorithm) {
    case Algorithm::sart:
      return f;
    case Algorithm::wtv: {
      RegularizeResult r = wtv_regularize(f, config.eps_hu, config.total_steps, config.line_search);
      record(r.stats);
      return std::move(r.image);
    }
    case Algorithm::ssatv1: {
      ImageGrid cur = f;
      for (const ScaleStep& level : schedule.levels) {
        if (level.steps == 0) continue;
        RegularizeResult r =
            ssatv1_regularize(cur, config.eps_hu, level.scale, level.steps, config.line_search);
        record(r.stats);
        cur = std::move(r.image);
      }
      return cur;
    }
    case Algorithm::ssatv2: {
      ImageGrid cur = f;
      for (const ScaleStep& level : schedule.levels) {
        if (level.steps == 0) continue;
        // Levels are rebuilt from the current image every outer iteration, so
        // each pass starts from weights of the post-SART image.
        PyramidLevel pl =
            make_pyramid_level(cur, level.scale, pyramid_kernel(level.scale), config.eps_hu);
        RegularizeResult r =
            ssatv2_substep(cur, pl, config.eps_hu, level.steps, config.line_search);
        record(r.stats);
        cur = std::move(r.image);
      }
      return cur;
    }
  }
  return f;
}

ReconResult run_reconstruction(const ReconConfig& config, const FanBeamProjector& projector,
                               const Sinogram& sinogram,
                               const std::optional<ReconReference>& reference,
                               const IterationCallback& on_iteration) {
  config.validate();
  if (sinogram.num_views() != projector.num_views() ||
      sinogram.num_channels() != projector.num_channels()) {
    throw std::invalid_argument("sinogram does not match the scan geometry");
  }
  if (reference) {
    if (!projector.matches(reference->image)) {
      throw std::invalid_argument("reference image does not match the reconstruction grid");
    }
    if (!reference->roi.valid_for(reference->image)) {
      throw std::invalid_argument("ROI lies outside the reconstruction grid");
    }
  }
  const ScaleSchedule schedule = config.schedule();

  ImageGrid f = projector.make_image();
  SartWorkspace work;
  ReconResult result{f, {}};
  for (int n = 1; n <= config.iterations; ++n) {
    const auto t_start = std::chrono::steady_clock::now();
    ConvergenceRow row;
    row.iter = n;

    sart_sweep(f, sinogram, projector, config.lambda, work);
    clamp_nonnegative(f);
    f = regularize_once(config, schedule, f, row);
    // A descent step can dip slightly below zero next to air; keep f feasible.
    clamp_nonnegative(f);

    row.min_value = f.min_value();
    if (reference) {
      row.roi_rmse_hu = roi_rmse(f, reference->image, reference->roi);
      row.full_rmse_hu = full_rmse(f, reference->image);
    }
    if (config.log_wall_time) {
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    }
    result.log.rows.push_back(row);
    if (on_iteration) on_iteration(row, f);
  }
  result.image = std::move(f);
  return result;
}

}  // namespace latomo
