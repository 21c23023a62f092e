// latomo: run limited-angle CT experiments from a config file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latomo/experiment.hpp"
#include "latomo/log.hpp"
#include "latomo/phantom.hpp"
#include "latomo/raw_io.hpp"
#include "latomo/threads.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kOk;
  } catch (const latomo::ValidationError& e) {
    std::cerr << "latomo: invalid configuration: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "latomo: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "latomo: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limited-angle fan-beam CT reconstruction (SART + wTV / ssaTV-1 / ssaTV-2)"};
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Print debug messages");

  std::string config_path;
  std::vector<std::string> overrides;
  bool desk = false;
  auto* run = app.add_subcommand("run", "Simulate, reconstruct and write all artifacts");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--set", overrides, "Override one setting, e.g. --set recon.iterations=50")
      ->allow_extra_args(false);
  run->add_flag("--desk", desk, "256x256 grid of 0.75 mm pixels, 200 iterations");

  std::vector<std::string> logs;
  std::string merged_out;
  auto* compare = app.add_subcommand("compare", "Merge ROI RMSE columns of convergence logs");
  compare->add_option("logs", logs, "Convergence CSV files")->required();
  compare->add_option("-o,--out", merged_out, "Write the merged CSV here instead of stdout");

  std::string spec = "builtin";
  std::string raw_out;
  std::size_t width = 512;
  std::size_t height = 512;
  double pixel_size = 0.5;
  std::string pgm_out;
  auto* phantom = app.add_subcommand("phantom", "Rasterize a phantom spec to a raw image");
  phantom->add_option("spec", spec, "Phantom spec file or 'builtin'")->required();
  phantom->add_option("--out", raw_out, "Output raw image")->required();
  phantom->add_option("--width", width, "Grid width in pixels")->check(CLI::PositiveNumber);
  phantom->add_option("--height", height, "Grid height in pixels")->check(CLI::PositiveNumber);
  phantom->add_option("--pixel-size", pixel_size, "Pixel size in mm")->check(CLI::PositiveNumber);
  phantom->add_option("--pgm", pgm_out, "Also write a 16-bit PGM preview (0..100 HU)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  if (quiet) latomo::log::set_level(latomo::log::Level::warn);
  if (verbose) latomo::log::set_level(latomo::log::Level::debug);

  const int threads = guarded([] { latomo::apply_thread_env(); });
  if (threads != kOk) return threads;

  if (*run) {
    return guarded([&] {
      const auto summary = latomo::run_experiment(config_path, overrides, desk);
      for (const auto& [alg, rmse] : summary.final_roi_rmse_hu) {
        std::cout << latomo::to_string(alg) << " final ROI RMSE " << rmse << " HU\n";
      }
      std::cout << "artifacts in " << summary.output_dir.string() << '\n';
    });
  }
  if (*compare) {
    return guarded([&] {
      std::vector<std::filesystem::path> paths(logs.begin(), logs.end());
      const auto merged = latomo::compare_runs(paths);
      for (const auto& w : merged.warnings) latomo::log::warn(w);
      if (merged_out.empty()) {
        std::cout << merged.csv;
      } else {
        std::ofstream out(merged_out, std::ios::trunc);
        out << merged.csv;
        if (!out) throw std::runtime_error("cannot write " + merged_out);
      }
    });
  }
  return guarded([&] {
    const auto ph = latomo::load_phantom(spec);
    const auto img = latomo::rasterize(ph, width, height, pixel_size);
    latomo::write_raw(raw_out, img);
    if (!pgm_out.empty()) latomo::write_pgm16(pgm_out, img, 0.0, 100.0);
  });
}
