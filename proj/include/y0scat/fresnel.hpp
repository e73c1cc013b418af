#pragma once

#include <string>
#include <vector>

#include "y0scat/reduced_field.hpp"

namespace y0scat {

// Multiview-multistatic measurements at one frequency. Matrices are
// receivers x transmitters; `present` marks entries where both total and
// incident fields were measured.
struct FresnelDataset {
  double frequency = 0.0;  // Hz
  double tx_radius = 0.0;  // m
  double rx_radius = 0.0;  // m
  std::vector<double> tx_angles;  // rad, sorted
  std::vector<double> rx_angles;  // rad, sorted
  CMatrix total;
  CMatrix incident;
  CMatrix scattered;
  DataMask present;
  bool limited_aspect = false;

  int views() const { return static_cast<int>(tx_angles.size()); }
  int receivers() const { return static_cast<int>(rx_angles.size()); }
};

// Reads the whitespace-separated text format
//   # tx_radius <metres>
//   # rx_radius <metres>
//   tx_deg rx_deg freq_GHz re_Et im_Et re_Ei im_Ei
// keeping only rows at `frequency_hz` (matched to 1 kHz). Other '#' lines
// are comments. Throws std::runtime_error with the line number on malformed
// rows and when the frequency is absent.
FresnelDataset parse_fresnel(const std::string& path, double frequency_hz);
FresnelDataset parse_fresnel_text(const std::string& text, double frequency_hz,
                                  const std::string& source = "<text>");

// Frequencies (Hz) present in a file, ascending.
std::vector<double> fresnel_frequencies(const std::string& path);

void write_fresnel(const FresnelDataset& data, const std::string& path);

MeasurementSetup fresnel_setup(const FresnelDataset& data, double domain_side);

struct Calibration {
  cplx factor{1.0, 0.0};
  int samples = 0;
};

// Complex factor c such that c * measured incident field matches the
// simulated unit line-source field, taken at the receiver closest to each
// source and averaged over transmitters.
Calibration calibrate(const FresnelDataset& data, const MeasurementSetup& setup);

// Scattered field scaled by the calibration factor, zero where absent.
CMatrix calibrated_scattered(const FresnelDataset& data, const Calibration& calibration);

}  // namespace y0scat
