#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "y0scat/csi.hpp"
#include "y0scat/linear_inv.hpp"

namespace y0scat {

enum class Method { ba, y0ba, ideal, csi, y0csi };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct SceneBlock {
  double side_wavelengths = 1.0;
  int cells = 0;
  int forward_refinement = 2;
  // exactly one of these two is set
  std::optional<PhantomKind> phantom;
  std::string data_file;
  cplx contrast{0.0, 0.0};
  // circle / two_circles / nested_circles, in background wavelengths
  double radius_wavelengths = 0.25;
  double center_x_wavelengths = 0.0;
  double center_y_wavelengths = 0.0;
  double separation_wavelengths = 0.0;
  double inner_radius_wavelengths = 0.0;
  cplx inner_contrast{0.0, 0.0};
};

struct SetupBlock {
  double frequency_hz = 0.0;
  int transmitters = 0;
  int receivers = 0;
  double radius_wavelengths = 0.0;
};

struct NoiseBlock {
  double snr_db = kNoiseless;
  std::uint64_t seed = 1;
};

struct MethodBlock {
  Method name = Method::y0ba;
  ThresholdOptions threshold;
  int max_iterations = 2000;
  double tolerance = 1e-6;
  bool total_variation = false;
  bool passivity = false;
  KernelOptions kernel;
};

struct Scenario {
  std::string name;
  SceneBlock scene;
  SetupBlock setup;
  NoiseBlock noise;
  MethodBlock method;
  std::string output_directory = "out";
};

// INI text with sections [scene] [setup] [noise] [method] [output]; see
// README for the key list. Throws std::invalid_argument naming the offending
// key on unknown keys, missing required values or contradictions.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);

Phantom make_phantom(const Scenario& scenario, double wavelength);

}  // namespace y0scat
