#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "y0scat/matrix_io.hpp"
#include "y0scat/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace y0scat;

namespace {

void apply_thread_env() {
  const char* env = std::getenv("Y0SCAT_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw std::invalid_argument(std::string("Y0SCAT_THREADS must be a positive integer, got '") + env + "'");
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

Scenario load_with_override(const std::string& path, const std::string& output) {
  Scenario s = load_scenario(path);
  if (!output.empty()) s.output_directory = output;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D scalar inverse scattering: H02 and Y0 models, BA/Y0-BA and CSI/Y0-CSI"};
  app.require_subcommand(1);

  std::string scenario_path, output;

  auto* run = app.add_subcommand("run", "run a scenario file and write its artifacts");
  run->add_option("scenario", scenario_path, "scenario .ini file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "override the output directory");

  double r_min = 0.1, r_max = 1.5;
  int points = 10, cells_per_lambda = 12;
  std::string sweep_out = "norm_sweep.csv";
  auto* sweep = app.add_subcommand("norm-sweep", "operator norms of Ai and AiY0 vs. domain radius");
  sweep->add_option("--min", r_min, "smallest R/lambda")->capture_default_str();
  sweep->add_option("--max", r_max, "largest R/lambda")->capture_default_str();
  sweep->add_option("--points", points, "number of radii")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--cells-per-lambda", cells_per_lambda)->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("-o,--output", sweep_out, "CSV path")->capture_default_str();

  auto* fwd = app.add_subcommand("forward-only", "simulate the scattered field of a scenario");
  fwd->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  fwd->add_option("-o,--output", output, "override the output directory");

  auto* ej0 = app.add_subcommand("validate-ej0", "check E_J0 from data against the forward currents");
  ej0->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_env();
    if (*run) {
      const Scenario s = load_with_override(scenario_path, output);
      const ScenarioOutcome o = run_scenario(s);
      std::cout << o.metrics_json;
      std::cerr << "wrote " << s.output_directory << "\n";
    } else if (*sweep) {
      if (points < 2 || !(r_min > 0.0) || !(r_max > r_min)) {
        throw std::invalid_argument("norm-sweep needs 0 < min < max and at least 2 points");
      }
      std::vector<double> radii(points);
      for (int i = 0; i < points; ++i) radii[i] = r_min + (r_max - r_min) * i / (points - 1);
      const NormSweep ns = norm_sweep(radii, cells_per_lambda);
      write_norm_sweep_csv(ns, sweep_out);
      for (int i = 0; i < points; ++i) {
        std::printf("R/lambda %.3f  |Ai| %.6g  |AiY0| %.6g\n", ns.radius_over_lambda[i], ns.norm_ai[i],
                    ns.norm_aiy0[i]);
      }
    } else if (*fwd) {
      const Scenario s = load_with_override(scenario_path, output);
      if (!s.scene.phantom) throw std::invalid_argument("forward-only needs a phantom scenario");
      const PreparedData d = prepare(s);
      std::filesystem::create_directories(s.output_directory);
      const auto dir = std::filesystem::path(s.output_directory);
      export_matrix({d.scattered, d.grid.side_length(), d.setup.wavelength}, (dir / "scattered.txt").string());
      export_matrix({d.scattered_clean, d.grid.side_length(), d.setup.wavelength},
                    (dir / "scattered_clean.txt").string());
      export_matrix({to_matrix(*d.truth), d.grid.side_length(), d.setup.wavelength},
                    (dir / "chi_true.txt").string());
      std::printf("scattered field %ld x %ld written to %s\n", static_cast<long>(d.scattered.rows()),
                  static_cast<long>(d.scattered.cols()), s.output_directory.c_str());
    } else if (*ej0) {
      const Scenario s = load_scenario(scenario_path);
      const J0Check c = validate_ej0(s);
      std::printf("grid %dx%d  n_max %d\n", c.cells_per_side, c.cells_per_side, c.n_max);
      std::printf("E_J0 relative error   %.3e\n", c.relative_error);
      std::printf("Y0 state residual     %.3e\n", c.state_residual);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
