// Writes synthetic measurement files in the Fresnel text format: forward
// simulation of the TwinDiel and FoamDielInt targets, incident and total
// fields scaled by an arbitrary complex gain, receivers within 60 degrees
// of the source removed.
#include <cmath>
#include <cstdio>
#include <string>

#include "y0scat/fresnel.hpp"

using namespace y0scat;

namespace {

constexpr double kTxRadius = 0.72;
constexpr double kRxRadius = 0.76;
constexpr double kSide = 0.15;
const cplx kGain = std::polar(370.0, 0.9);

FresnelDataset simulate(const Phantom& phantom, double frequency, int views, int receivers, int cells,
                        std::uint64_t seed) {
  std::vector<double> tx(views), rx(receivers);
  for (int v = 0; v < views; ++v) tx[v] = 2.0 * kPi * v / views;
  for (int m = 0; m < receivers; ++m) rx[m] = 2.0 * kPi * m / receivers;
  const MeasurementSetup setup = make_setup_from_angles(frequency, kTxRadius, tx, kRxRadius, rx, kSide);
  const Grid grid(kSide, cells);
  const ForwardSolution sol = solve_forward(rasterize(phantom, grid), grid, setup);
  const CMatrix es = add_noise(sol.scattered.values, 30.0, seed);
  const CMatrix ei = incident_at(setup.receivers, setup);

  FresnelDataset d;
  d.frequency = frequency;
  d.tx_radius = kTxRadius;
  d.rx_radius = kRxRadius;
  d.tx_angles = tx;
  d.rx_angles = rx;
  d.incident = ei / kGain;
  d.total = (ei + es) / kGain;
  d.scattered = d.total - d.incident;
  d.present = DataMask::Constant(receivers, views, true);
  for (int v = 0; v < views; ++v) {
    for (int m = 0; m < receivers; ++m) {
      const double gap = std::abs(std::remainder(rx[m] - tx[v], 2.0 * kPi));
      if (gap < kPi / 3.0 - 1e-9) d.present(m, v) = false;
    }
  }
  return d;
}

void append(const std::string& path, const FresnelDataset& d, bool first) {
  const std::string tmp = path + ".part";
  write_fresnel(d, tmp);
  std::FILE* in = std::fopen(tmp.c_str(), "r");
  std::FILE* out = std::fopen(path.c_str(), first ? "w" : "a");
  char line[512];
  while (std::fgets(line, sizeof line, in)) {
    if (!first && line[0] == '#') continue;
    std::fputs(line, out);
  }
  std::fclose(in);
  std::fclose(out);
  std::remove(tmp.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ".";
  const Phantom twin = make_two_circles({0.0, -0.015}, {0.0, 0.015}, 0.015, 2.0);
  append(dir + "/twin_diel.txt", simulate(twin, 4e9, 72, 36, 80, 11), true);
  append(dir + "/twin_diel.txt", simulate(twin, 6e9, 72, 36, 100, 12), false);
  const Phantom foam =
      make_nested_circles({0.0, 0.0}, 0.04, 0.45, {-0.005, 0.0}, 0.0155, 2.0);
  append(dir + "/foam_diel_int.txt", simulate(foam, 3e9, 45, 36, 80, 13), true);
  std::printf("fixtures written to %s\n", dir.c_str());
  return 0;
}
