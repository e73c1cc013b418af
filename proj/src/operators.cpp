#include "y0scat/operators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "y0scat/specfun.hpp"

namespace y0scat {

cplx greens(Point r, Point source, double k) {
  const double d = distance(r, source);
  if (d == 0.0) throw std::domain_error("greens: coincident observation and source points");
  return -0.25 * kJ * k * k * hankel2(0, k * d);
}

cplx cell_greens(double k, double a, double rho) {
  if (!(rho > a)) throw std::domain_error("cell_greens: observation point inside the cell");
  return -0.5 * kJ * kPi * k * a * bessel_j(1, k * a) * hankel2(0, k * rho);
}

cplx cell_greens_self(double k, double a) {
  // k^2 * int_disc -(j/4) H0(k r) dA = -(j pi k a / 2) H1(k a) - 1
  return -0.5 * kJ * kPi * k * a * hankel2(1, k * a) - 1.0;
}

cplx cell_greens_j0(double k, double a, double rho) {
  return -0.5 * kJ * kPi * k * a * bessel_j(1, k * a) * bessel_j(0, k * rho);
}

namespace {

void check_grid_size(const Grid& grid, int max_cells_per_side) {
  if (grid.n() > max_cells_per_side) {
    throw std::length_error("assemble: grid of " + std::to_string(grid.n()) +
                            " cells per side exceeds the configured limit of " +
                            std::to_string(max_cells_per_side));
  }
}

}  // namespace

GridConvolution internal_operator(const Grid& grid, double k) {
  const double a = grid.equivalent_radius();
  const double d = grid.cell_size();
  const cplx self = cell_greens_self(k, a);
  return GridConvolution::from_kernel(grid.n(), [&](int di, int dj) {
    if (di == 0 && dj == 0) return self;
    return cell_greens(k, a, d * std::hypot(di, dj));
  });
}

GridConvolution internal_operator_j0(const Grid& grid, double k) {
  const double a = grid.equivalent_radius();
  const double d = grid.cell_size();
  return GridConvolution::from_kernel(
      grid.n(), [&](int di, int dj) { return cell_greens_j0(k, a, d * std::hypot(di, dj)); });
}

CMatrix external_operator(const Grid& grid, const std::vector<Point>& receivers, double k) {
  const double a = grid.equivalent_radius();
  CMatrix ae(receivers.size(), grid.cell_count());
  for (std::size_t m = 0; m < receivers.size(); ++m) {
    for (int p = 0; p < grid.cell_count(); ++p) {
      ae(m, p) = cell_greens(k, a, distance(receivers[m], grid.center(p)));
    }
  }
  return ae;
}

DiscreteOperators assemble(const Grid& grid, const MeasurementSetup& setup,
                           const AssembleOptions& options) {
  check_grid_size(grid, options.max_cells_per_side);
  const double k = setup.wavenumber;
  DiscreteOperators ops{grid, k, external_operator(grid, setup.receivers, k),
                        internal_operator(grid, k), internal_operator_j0(grid, k), {}};
  ops.AiY0 = ops.Ai - ops.AiJ0;
  return ops;
}

DenseInternal assemble_dense(const DiscreteOperators& ops, int max_cells) {
  if (ops.grid.cell_count() > max_cells) {
    throw std::length_error("assemble_dense: " + std::to_string(ops.grid.cell_count()) +
                            " unknowns exceed the dense limit");
  }
  return {ops.Ai.dense(), ops.AiJ0.dense(), ops.AiY0.dense()};
}

double operator_norm(const LinearMap& a, const NormOptions& options) {
  if (a.cols == 0 || a.rows == 0) return 0.0;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  CVector v(a.cols);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(gauss(rng), gauss(rng));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const CVector av = a.apply(v);
    const double next = av.squaredNorm();  // Rayleigh quotient of A^H A
    CVector w = a.apply_adjoint(av);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= options.tolerance * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

double operator_norm(const CMatrix& a, const NormOptions& options) {
  return operator_norm(as_linear_map(a), options);
}

NormSweep norm_sweep(const std::vector<double>& radius_over_lambda, int cells_per_lambda) {
  if (cells_per_lambda < 1) throw std::invalid_argument("norm_sweep: cells_per_lambda < 1");
  NormSweep out;
  const double k = 2.0 * kPi;  // lambda = 1
  double previous = 0.0;
  for (double r : radius_over_lambda) {
    if (!(r > previous)) throw std::invalid_argument("norm_sweep: radii must be positive ascending");
    previous = r;
    const int n = std::max(8, static_cast<int>(std::ceil(2.0 * r * cells_per_lambda)));
    const Grid grid(2.0 * r, n);
    std::vector<bool> mask(grid.cell_count());
    int inside = 0;
    for (int p = 0; p < grid.cell_count(); ++p) {
      mask[p] = norm(grid.center(p)) <= r;
      inside += mask[p];
    }
    const GridConvolution ai = internal_operator(grid, k);
    const GridConvolution aiy0 = ai - internal_operator_j0(grid, k);
    out.radius_over_lambda.push_back(r);
    out.norm_ai.push_back(operator_norm(masked(ai, mask)));
    out.norm_aiy0.push_back(operator_norm(masked(aiy0, mask)));
    out.cells.push_back(inside);
  }
  return out;
}

CVector neumann_series_apply(const GridConvolution& ai, const CVector& chi, const CVector& incident,
                             int terms) {
  if (chi.size() != ai.size() || incident.size() != ai.size()) {
    throw std::invalid_argument("neumann_series_apply: size mismatch");
  }
  CVector term = incident;
  CVector sum = incident;
  for (int p = 1; p <= terms; ++p) {
    term = ai.apply(CVector(chi.cwiseProduct(term)));
    sum += term;
  }
  return sum;
}

}  // namespace y0scat
