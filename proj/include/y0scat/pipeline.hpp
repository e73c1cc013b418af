#pragma once

#include <optional>
#include <string>

#include "y0scat/fresnel.hpp"
#include "y0scat/scenario.hpp"

namespace y0scat {

// Everything a method needs: inversion grid, operators, data.
struct PreparedData {
  MeasurementSetup setup;
  Grid grid{1.0, 2};
  DiscreteOperators ops;
  CMatrix scattered;  // receivers x views, noisy
  CMatrix scattered_clean;
  DataMask mask;
  std::optional<ContrastMap> truth;       // on the inversion grid
  std::optional<CMatrix> total_coarse;    // true total field restricted to the grid
  std::optional<CMatrix> currents_coarse;
  std::optional<Calibration> calibration;
  bool limited_aspect = false;
};

PreparedData prepare(const Scenario& scenario);

struct ScenarioOutcome {
  InversionResult result;
  PreparedData data;
  std::string metrics_json;
};

InversionResult run_method(const Scenario& scenario, const PreparedData& data);

// Runs the scenario; writes artifacts to scenario.output_directory unless
// `write_files` is false.
ScenarioOutcome run_scenario(const Scenario& scenario, bool write_files = true);

std::string metrics_json(const Scenario& scenario, const PreparedData& data,
                         const InversionResult& result);

struct J0Check {
  double relative_error = 0.0;  // |E_J0(data) - E_J0(currents)| / |E_J0(currents)|
  double state_residual = 0.0;  // Y0 state equation, true contrast and currents
  int n_max = 0;
  int cells_per_side = 0;
};

// Solves the forward problem of a phantom scenario on its refined grid and
// compares E_J0 obtained from the (noisy) receiver data with the value
// computed from the forward currents, both on the refined grid.
J0Check validate_ej0(const Scenario& scenario);

// CSV writers used for plot data.
void write_iterations_csv(const InversionResult& result, const std::string& path);
void write_chi_map_csv(const ContrastMap& estimate, const ContrastMap* truth, const Grid& grid,
                       double wavelength, const std::string& path);
void write_norm_sweep_csv(const NormSweep& sweep, const std::string& path);

}  // namespace y0scat
