#pragma once

#include <vector>

#include "y0scat/grid_convolution.hpp"
#include "y0scat/scene.hpp"

namespace y0scat {

// Background Green's function G_b = -(j/4) k^2 H0^(2)(k |r - r'|).
// Throws std::domain_error for coincident points.
cplx greens(Point r, Point source, double k);

// Richmond circular-cell integrals of G_b and of its J0 part over a disc of
// radius `a` whose centre is at distance `rho` from the observation point.
cplx cell_greens(double k, double a, double rho);      // rho > a
cplx cell_greens_self(double k, double a);              // rho = 0
cplx cell_greens_j0(double k, double a, double rho);   // any rho >= 0

// Discretised radiation operators. Ae is dense (receivers x cells); the
// internal operators are convolutions on the grid.
struct DiscreteOperators {
  Grid grid{1.0, 2};
  double k = 0.0;
  CMatrix Ae;
  GridConvolution Ai;
  GridConvolution AiJ0;
  GridConvolution AiY0;  // Ai - AiJ0, offset by offset
};

struct AssembleOptions {
  int max_cells_per_side = 512;
};

DiscreteOperators assemble(const Grid& grid, const MeasurementSetup& setup,
                           const AssembleOptions& options = {});

// Internal operators only (no antennas), for norm studies.
GridConvolution internal_operator(const Grid& grid, double k);
GridConvolution internal_operator_j0(const Grid& grid, double k);

CMatrix external_operator(const Grid& grid, const std::vector<Point>& receivers, double k);

struct DenseInternal {
  CMatrix Ai;
  CMatrix AiJ0;
  CMatrix AiY0;
};

// Materialises the three internal matrices. Throws std::length_error above
// `max_cells` unknowns.
DenseInternal assemble_dense(const DiscreteOperators& ops, int max_cells = 4096);

struct NormOptions {
  double tolerance = 1e-12;
  int max_iterations = 20000;
  unsigned seed = 7;
};

// Largest singular value by power iteration on A^H A.
double operator_norm(const LinearMap& a, const NormOptions& options = {});
double operator_norm(const CMatrix& a, const NormOptions& options = {});

struct NormSweep {
  std::vector<double> radius_over_lambda;
  std::vector<double> norm_ai;
  std::vector<double> norm_aiy0;
  std::vector<int> cells;  // unknowns inside the circular domain
};

// Circular domain of radius R (masked square grid of side 2R) for each R/lambda.
NormSweep norm_sweep(const std::vector<double>& radius_over_lambda, int cells_per_lambda);

// Partial Neumann sum sum_{p=0}^{terms} (Ai X)^p E_i.
CVector neumann_series_apply(const GridConvolution& ai, const CVector& chi, const CVector& incident,
                             int terms);

}  // namespace y0scat
