#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "y0scat/operators.hpp"
#include "y0scat/scene.hpp"

namespace y0scat {

enum class FieldKind { incident, total, scattered, currents, reduced_incident, reduced_j0 };

// Complex samples per (location, view). Locations are grid cells or receivers.
struct MultiviewField {
  FieldKind kind = FieldKind::incident;
  CMatrix values;
};

// Unit-strength TM line sources: E_i^v(r) = -(j/4) H0^(2)(k |r - r_t^v|).
MultiviewField incident_field(const Grid& grid, const MeasurementSetup& setup);
CMatrix incident_at(const std::vector<Point>& points, const MeasurementSetup& setup);

enum class LinearSolver { automatic, dense_lu, gmres };

struct ForwardOptions {
  LinearSolver solver = LinearSolver::automatic;
  int dense_limit = 1600;  // automatic: dense LU up to this many unknowns
  double tolerance = 1e-10;
  int restart = 120;
  int max_iterations = 3000;
};

struct ForwardSolution {
  MultiviewField incident;
  MultiviewField total;
  MultiviewField currents;
  MultiviewField scattered;
  int iterations = 0;  // worst view, GMRES only
};

// Solves (I - Ai X) E_t = E_i per view, W = X E_t, E_s = Ae W.
// Throws std::runtime_error when the system is singular or the iterative
// solver does not converge.
ForwardSolution solve_forward(const ContrastMap& chi, const DiscreteOperators& ops,
                              const MeasurementSetup& setup, const ForwardOptions& options = {});
ForwardSolution solve_forward(const ContrastMap& chi, const Grid& grid,
                              const MeasurementSetup& setup, const ForwardOptions& options = {});

// Scattering coefficients a_n, n = -n_max..n_max, of a centred homogeneous
// cylinder: outside field J_n(kr) + a_n H_n^(2)(kr).
std::vector<cplx> mie_coefficients(double k, double radius, double eps_r, int n_max);

// Scattered field (receivers x views) of a centred homogeneous cylinder
// illuminated by the set-up's line sources. n_max = ceil(k radius) + extra_orders.
CMatrix mie_reference(double radius, double eps_r, const MeasurementSetup& setup,
                      int extra_orders = 15);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

// Complex white Gaussian noise scaled per view so that
// 10 log10(|E_s^v|^2 / |n^v|^2) equals snr_db exactly.
CMatrix add_noise(const CMatrix& scattered, double snr_db, std::uint64_t seed);

// Block average of a field sampled on a grid `factor` times finer.
CMatrix restrict_to_coarse(const CMatrix& fine, int fine_n, int factor);

}  // namespace y0scat
