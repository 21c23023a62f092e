#include "latomo/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "latomo/log.hpp"
#include "latomo/metrics.hpp"
#include "latomo/projector.hpp"
#include "latomo/raw_io.hpp"

namespace latomo {
namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::string& lookup(const ConfigMap& c, const std::string& key) {
  auto it = c.find(key);
  if (it == c.end()) throw ValidationError("missing config key " + key);
  return it->second;
}

double as_double(const ConfigMap& c, const std::string& key) {
  const std::string& v = lookup(c, key);
  // strtod accepts exponents such as 5e6 the same way everywhere.
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw ValidationError(key + ": expected a number, got '" + v + "'");
  }
  return d;
}

long as_integer(const ConfigMap& c, const std::string& key) {
  const double d = as_double(c, key);
  if (std::floor(d) != d) throw ValidationError(key + ": expected an integer, got '" + lookup(c, key) + "'");
  return static_cast<long>(d);
}

std::size_t as_count(const ConfigMap& c, const std::string& key) {
  const long v = as_integer(c, key);
  if (v <= 0) throw ValidationError(key + " must be positive");
  return static_cast<std::size_t>(v);
}

std::vector<double> as_list(const ConfigMap& c, const std::string& key, std::size_t n) {
  std::vector<double> out;
  for (const std::string& item : split(lookup(c, key), ',')) {
    ConfigMap tmp{{key, item}};
    out.push_back(as_double(tmp, key));
  }
  if (n != 0 && out.size() != n) {
    throw ValidationError(key + ": expected " + std::to_string(n) + " comma-separated values");
  }
  return out;
}

Window as_window(const ConfigMap& c, const std::string& key) {
  const auto v = as_list(c, key, 2);
  if (!(v[1] > v[0])) throw ValidationError(key + ": window must be lo,hi with hi > lo");
  return {v[0], v[1]};
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

ImageGrid difference(const ImageGrid& a, const ImageGrid& b) {
  ImageGrid d = a.zeros_like();
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

ConfigMap default_config() {
  return {
      {"phantom.spec", "builtin"},
      {"phantom.width", "512"},
      {"phantom.height", "512"},
      {"phantom.pixel_size", "0.5"},
      {"geometry.source_to_detector", "1088"},
      {"geometry.source_to_isocenter", "544"},
      {"geometry.detector_channels", "768"},
      {"geometry.channel_size", "0.5"},
      {"geometry.angle_start", "10"},
      {"geometry.angle_end", "170"},
      {"geometry.angle_increment", "1"},
      {"noise.model", "none"},
      {"noise.incident_photons", "5e6"},
      {"noise.seed", "42"},
      {"recon.algorithms", "sart,wtv,ssatv1,ssatv2"},
      {"recon.lambda", "0.8"},
      {"recon.eps", "5"},
      {"recon.M", "10"},
      {"recon.l_max", "3"},
      {"recon.budget", ""},
      {"recon.iterations", "500"},
      {"recon.ls_alpha", "0.3"},
      {"recon.ls_beta", "0.6"},
      {"recon.ls_t0", "4e-4"},
      {"recon.ls_max_shrinks", "30"},
      {"metrics.roi", ""},
      {"output.dir", "latomo_out"},
      {"output.window_image", "0,100"},
      {"output.window_difference", "-25,25"},
      {"output.window_bars", "0,800"},
      {"output.log_wall_time", "true"},
  };
}

ConfigMap parse_config(const std::string& text, ConfigMap base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!base.contains(full)) throw ValidationError(where + "unknown key " + full);
    base[full] = trim(line.substr(eq + 1));
  }
  return base;
}

void apply_override(ConfigMap& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  if (!config.contains(key)) throw ValidationError("--set: unknown key " + key);
  config[key] = trim(assignment.substr(eq + 1));
}

void apply_desk_preset(ConfigMap& config) {
  config["phantom.width"] = "256";
  config["phantom.height"] = "256";
  config["phantom.pixel_size"] = "0.75";
  config["recon.iterations"] = "200";
}

std::string format_config(const ConfigMap& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& [full, value] : config) {
    const auto dot = full.find('.');
    const std::string sec = full.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << full.substr(dot + 1) << " = " << value << '\n';
  }
  return out.str();
}

ConfigMap load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig resolve_config(const ConfigMap& c, const fs::path& base_dir) {
  ExperimentConfig e;
  e.phantom = lookup(c, "phantom.spec");
  if (e.phantom != "builtin" && fs::path(e.phantom).is_relative() && !base_dir.empty()) {
    e.phantom = (base_dir / e.phantom).lexically_normal().string();
  }
  e.width = as_count(c, "phantom.width");
  e.height = as_count(c, "phantom.height");
  e.pixel_size = as_double(c, "phantom.pixel_size");
  if (!(e.pixel_size > 0)) throw ValidationError("phantom.pixel_size must be > 0");

  auto& g = e.geometry;
  g.source_to_detector = as_double(c, "geometry.source_to_detector");
  g.source_to_isocenter = as_double(c, "geometry.source_to_isocenter");
  g.detector_channels = as_count(c, "geometry.detector_channels");
  g.channel_size = as_double(c, "geometry.channel_size");
  g.angle_start = as_double(c, "geometry.angle_start");
  g.angle_end = as_double(c, "geometry.angle_end");
  g.angle_increment = as_double(c, "geometry.angle_increment");
  try {
    g.validate();
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(ex.what());
  }

  const std::string model = lookup(c, "noise.model");
  if (model == "poisson") {
    NoiseSpec n;
    n.incident_photons = as_double(c, "noise.incident_photons");
    if (!(n.incident_photons > 0)) throw ValidationError("noise.incident_photons must be > 0");
    const long seed = as_integer(c, "noise.seed");
    if (seed < 0) throw ValidationError("noise.seed must be >= 0");
    n.rng_seed = static_cast<std::uint64_t>(seed);
    e.noise = n;
  } else if (model != "none") {
    throw ValidationError("noise.model must be 'none' or 'poisson'");
  }

  try {
    for (const std::string& name : split(lookup(c, "recon.algorithms"), ',')) {
      e.algorithms.push_back(parse_algorithm(name));
    }
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(std::string("recon.algorithms: ") + ex.what());
  }
  if (e.algorithms.empty()) throw ValidationError("recon.algorithms lists no algorithm");

  auto& r = e.recon;
  r.lambda = as_double(c, "recon.lambda");
  r.eps_hu = as_double(c, "recon.eps");
  r.total_steps = static_cast<int>(as_integer(c, "recon.M"));
  r.l_max = static_cast<int>(as_integer(c, "recon.l_max"));
  r.iterations = static_cast<int>(as_integer(c, "recon.iterations"));
  r.line_search.alpha = as_double(c, "recon.ls_alpha");
  r.line_search.beta = as_double(c, "recon.ls_beta");
  r.line_search.t0 = as_double(c, "recon.ls_t0");
  r.line_search.max_shrinks = static_cast<int>(as_integer(c, "recon.ls_max_shrinks"));
  if (!lookup(c, "recon.budget").empty()) {
    for (double b : as_list(c, "recon.budget", 0)) {
      if (std::floor(b) != b) throw ValidationError("recon.budget entries must be integers");
      r.budget.push_back(static_cast<int>(b));
    }
  }
  const std::string wall = lookup(c, "output.log_wall_time");
  if (wall != "true" && wall != "false") {
    throw ValidationError("output.log_wall_time must be true or false");
  }
  r.log_wall_time = wall == "true";
  // Validate as the scale-space variant so schedule errors surface even when
  // only wtv is requested.
  try {
    ReconConfig probe = r;
    probe.algorithm = Algorithm::ssatv2;
    probe.validate();
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(ex.what());
  }

  if (!lookup(c, "metrics.roi").empty()) {
    const auto v = as_list(c, "metrics.roi", 4);
    if (!(v[2] > v[0] && v[3] > v[1])) {
      throw ValidationError("metrics.roi must be xmin,ymin,xmax,ymax with max > min");
    }
    e.roi = RoiMm{v[0], v[1], v[2], v[3]};
  }
  e.image_window = as_window(c, "output.window_image");
  e.difference_window = as_window(c, "output.window_difference");
  e.bars_window = as_window(c, "output.window_bars");
  e.output_dir = lookup(c, "output.dir");
  if (e.output_dir.empty()) throw ValidationError("output.dir must not be empty");
  if (e.output_dir.is_relative() && !base_dir.empty()) e.output_dir = base_dir / e.output_dir;
  return e;
}

PhantomSpec load_phantom(const std::string& phantom) {
  if (phantom == "builtin") return builtin_head_phantom();
  try {
    return load_phantom_spec(phantom);
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(std::string("phantom.spec: ") + ex.what());
  } catch (const std::runtime_error& ex) {
    throw ValidationError(std::string("phantom.spec: ") + ex.what());
  }
}

ExperimentSummary run_experiment(const ConfigMap& config, const fs::path& base_dir) {
  const ExperimentConfig e = resolve_config(config, base_dir);
  const PhantomSpec spec = load_phantom(e.phantom);

  const double fan_radius = e.geometry.covered_radius();
  if (spec.extent_radius() > fan_radius) {
    throw ValidationError("phantom extends to " + num(spec.extent_radius()) +
                          " mm but the fan only covers " + num(fan_radius) +
                          " mm; widen geometry.detector_channels or shrink the phantom");
  }

  std::error_code ec;
  fs::create_directories(e.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + e.output_dir.string());

  std::ostringstream params;
  params << "grid " << e.width << "x" << e.height << " @ " << e.pixel_size << " mm; "
         << e.geometry.num_views() << " views " << e.geometry.angle_start << ".."
         << e.geometry.angle_end << " deg step " << e.geometry.angle_increment << "; "
         << e.geometry.detector_channels << " x " << e.geometry.channel_size
         << " mm detector; d = " << e.geometry.source_to_detector
         << " mm, d' = " << e.geometry.source_to_isocenter << " mm; noise "
         << (e.noise ? "poisson N0=" + num(e.noise->incident_photons) +
                           " seed=" + std::to_string(e.noise->rng_seed)
                     : std::string("none"));
  log::info(params.str());

  {
    std::ofstream echo(e.output_dir / "config.ini", std::ios::trunc);
    ConfigMap resolved = config;
    resolved["phantom.spec"] = e.phantom;
    resolved["output.dir"] = ".";
    echo << format_config(resolved);
    std::ofstream ph(e.output_dir / "phantom.txt", std::ios::trunc);
    ph << format_phantom_spec(spec);
    if (!echo || !ph) throw std::runtime_error("cannot write into " + e.output_dir.string());
  }

  const ImageGrid truth = rasterize(spec, e.width, e.height, e.pixel_size);
  write_raw(e.output_dir / "ground_truth.raw", truth);
  write_pgm16(e.output_dir / "ground_truth.pgm", truth, e.image_window.lo, e.image_window.hi);
  write_pgm16(e.output_dir / "ground_truth_bars.pgm", truth, e.bars_window.lo, e.bars_window.hi);

  const FanBeamProjector projector(e.geometry, truth);
  const Sinogram clean = projector.forward_project(truth);
  write_raw(e.output_dir / "sinogram_clean.raw", clean, e.geometry.channel_size);
  Sinogram data = clean;
  if (e.noise) {
    data = add_poisson_noise(clean, *e.noise);
    write_raw(e.output_dir / "sinogram_noisy.raw", data, e.geometry.channel_size);
  }

  RoiRect roi = full_roi(truth);
  if (e.roi) {
    roi = roi_from_mm(truth, e.roi->xmin, e.roi->ymin, e.roi->xmax, e.roi->ymax);
  } else if (spec.roi) {
    roi = roi_from_mm(truth, spec.roi->xmin, spec.roi->ymin, spec.roi->xmax, spec.roi->ymax);
  }
  const ReconReference reference{truth, roi};

  ExperimentSummary summary{e.output_dir, {}};
  for (Algorithm alg : e.algorithms) {
    ReconConfig rc = e.recon;
    rc.algorithm = alg;
    const std::string name(to_string(alg));
    log::info("reconstructing with " + name);
    const ReconResult res = run_reconstruction(rc, projector, data, reference,
                                               [&](const ConvergenceRow& row, const ImageGrid&) {
                                                 if (row.iter % 50 == 0) {
                                                   log::info(name + " iteration " +
                                                             std::to_string(row.iter) +
                                                             " roi_rmse " +
                                                             num(*row.roi_rmse_hu) + " HU");
                                                 }
                                               });
    write_raw(e.output_dir / ("recon_" + name + ".raw"), res.image);
    write_pgm16(e.output_dir / ("recon_" + name + ".pgm"), res.image, e.image_window.lo,
                e.image_window.hi);
    write_pgm16(e.output_dir / ("recon_" + name + "_bars.pgm"), res.image, e.bars_window.lo,
                e.bars_window.hi);
    const ImageGrid diff = difference(res.image, truth);
    write_raw(e.output_dir / ("diff_" + name + ".raw"), diff);
    write_pgm16_difference(e.output_dir / ("diff_" + name + ".pgm"), diff,
                           e.difference_window.lo, e.difference_window.hi);
    res.log.write_csv(e.output_dir / ("log_" + name + ".csv"));
    summary.final_roi_rmse_hu.emplace_back(alg, *res.log.rows.back().roi_rmse_hu);
  }
  return summary;
}

ExperimentSummary run_experiment(const fs::path& config_path,
                                 const std::vector<std::string>& overrides, bool desk) {
  ConfigMap config = load_config(config_path);
  if (desk) apply_desk_preset(config);
  for (const std::string& o : overrides) apply_override(config, o);
  return run_experiment(config, config_path.parent_path());
}

MergedLogs compare_runs(const std::vector<fs::path>& log_paths) {
  if (log_paths.empty()) throw ValidationError("compare needs at least one log");
  MergedLogs merged;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> columns;
  for (const fs::path& path : log_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string header;
    std::getline(in, header);
    const auto head = split(header, ',');
    const auto it = std::find(head.begin(), head.end(), "roi_rmse_hu");
    if (head.empty() || head.front() != "iter" || it == head.end()) {
      throw ValidationError(path.string() + ": not a convergence log (missing iter/roi_rmse_hu)");
    }
    const auto col = static_cast<std::size_t>(it - head.begin());
    std::vector<std::string> values;
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      // Keep empty cells: split() would drop them.
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
      if (!line.empty() && line.back() == ',') cells.emplace_back();
      const std::size_t expect = values.size() + 1;
      if (cells.empty() || cells.front() != std::to_string(expect)) {
        throw ValidationError(path.string() + ": iteration column is not 1, 2, 3, ...");
      }
      values.push_back(col < cells.size() ? cells[col] : std::string());
    }
    std::string name = path.stem().string();
    std::string unique = name;
    for (int k = 2; std::find(names.begin(), names.end(), unique) != names.end(); ++k) {
      unique = name + "_" + std::to_string(k);
    }
    names.push_back(unique);
    columns.push_back(std::move(values));
  }

  std::size_t rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != rows) {
      merged.warnings.push_back(names[i] + " has " + std::to_string(columns[i].size()) +
                                " iterations, padded to " + std::to_string(rows));
    }
  }

  std::ostringstream out;
  out << "iter";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << r + 1;
    for (const auto& c : columns) out << ',' << (r < c.size() ? c[r] : std::string());
    out << '\n';
  }
  merged.csv = out.str();
  return merged;
}

}  // namespace latomo
