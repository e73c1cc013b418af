#include "y0scat/forward.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "y0scat/specfun.hpp"

namespace y0scat {

CMatrix incident_at(const std::vector<Point>& points, const MeasurementSetup& setup) {
  const double k = setup.wavenumber;
  CMatrix e(points.size(), setup.views());
  for (int v = 0; v < setup.views(); ++v) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double d = distance(points[p], setup.transmitters[v]);
      if (d == 0.0) throw std::domain_error("incident field evaluated on a transmitter");
      e(p, v) = -0.25 * kJ * hankel2(0, k * d);
    }
  }
  return e;
}

MultiviewField incident_field(const Grid& grid, const MeasurementSetup& setup) {
  const double half = 0.5 * grid.side_length();
  for (const Point& t : setup.transmitters) {
    if (std::abs(t.x) <= half && std::abs(t.y) <= half) {
      throw std::invalid_argument("incident_field: transmitter inside the investigation domain");
    }
  }
  std::vector<Point> centers(grid.cell_count());
  for (int p = 0; p < grid.cell_count(); ++p) centers[p] = grid.center(p);
  return {FieldKind::incident, incident_at(centers, setup)};
}

namespace {

// Restarted GMRES with Givens rotations for A x = b.
template <typename Apply>
int gmres(const Apply& apply, const CVector& b, CVector& x, double tol, int restart,
          int max_iterations) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return 0;
  }
  const int n = static_cast<int>(b.size());
  const int m = std::min(restart, n);
  int total = 0;
  CMatrix basis(n, m + 1);
  CMatrix h = CMatrix::Zero(m + 1, m);
  std::vector<cplx> cs(m), sn(m);
  CVector g(m + 1);
  while (total < max_iterations) {
    CVector r = b - apply(x);
    double beta = r.norm();
    if (beta <= tol * bnorm) return total;
    basis.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    h.setZero();
    int j = 0;
    for (; j < m && total < max_iterations; ++j, ++total) {
      CVector w = apply(CVector(basis.col(j)));
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        h(i, j) = basis.col(i).dot(w);
        w -= h(i, j) * basis.col(i);
      }
      h(j + 1, j) = w.norm();
      if (std::abs(h(j + 1, j)) > 0.0) basis.col(j + 1) = w / h(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const cplx t = std::conj(cs[i]) * h(i, j) + std::conj(sn[i]) * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(std::abs(h(j, j)), std::abs(h(j + 1, j)));
      cs[j] = h(j, j) / denom;
      sn[j] = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      if (std::abs(g[j + 1]) <= tol * bnorm) {
        ++j;
        ++total;
        break;
      }
    }
    CVector y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += basis.leftCols(j) * y;
  }
  return (b - apply(x)).norm() <= tol * bnorm * 10.0 ? total : -1;
}

}  // namespace

ForwardSolution solve_forward(const ContrastMap& chi, const DiscreteOperators& ops,
                              const MeasurementSetup& setup, const ForwardOptions& options) {
  const Grid& grid = ops.grid;
  if (chi.values.size() != grid.cell_count()) {
    throw std::invalid_argument("solve_forward: contrast map does not match the grid");
  }
  ForwardSolution sol;
  sol.incident = incident_field(grid, setup);
  const int nc = grid.cell_count();
  const int views = setup.views();
  CMatrix total(nc, views);

  const bool dense = options.solver == LinearSolver::dense_lu ||
                     (options.solver == LinearSolver::automatic && nc <= options.dense_limit);
  if (dense) {
    CMatrix system = -ops.Ai.dense() * chi.values.asDiagonal();
    system.diagonal().array() += 1.0;
    Eigen::PartialPivLU<CMatrix> lu(system);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
      throw std::runtime_error("solve_forward: singular state equation (rcond = " +
                               std::to_string(rcond) + ")");
    }
    total = lu.solve(sol.incident.values);
  } else {
    const CVector& x = chi.values;
    auto apply = [&](const CVector& e) -> CVector {
      return e - ops.Ai.apply(CVector(x.cwiseProduct(e)));
    };
    int worst = 0;
    bool failed = false;
#pragma omp parallel for schedule(dynamic) reduction(max : worst) reduction(|| : failed)
    for (int v = 0; v < views; ++v) {
      CVector e = sol.incident.values.col(v);
      const int it = gmres(apply, CVector(sol.incident.values.col(v)), e, options.tolerance,
                           options.restart, options.max_iterations);
      if (it < 0) failed = true;
      worst = std::max(worst, it);
      total.col(v) = e;
    }
    if (failed) {
      throw std::runtime_error("solve_forward: GMRES did not converge (resonant contrast?)");
    }
    sol.iterations = worst;
  }
  if (!total.allFinite()) throw std::runtime_error("solve_forward: non-finite total field");
  sol.total = {FieldKind::total, total};
  sol.currents = {FieldKind::currents, chi.values.asDiagonal() * total};
  sol.scattered = {FieldKind::scattered, ops.Ae * sol.currents.values};
  return sol;
}

ForwardSolution solve_forward(const ContrastMap& chi, const Grid& grid,
                              const MeasurementSetup& setup, const ForwardOptions& options) {
  return solve_forward(chi, assemble(grid, setup), setup, options);
}

std::vector<cplx> mie_coefficients(double k, double radius, double eps_r, int n_max) {
  if (!(radius > 0.0) || !(eps_r > 0.0)) {
    throw std::invalid_argument("mie_coefficients: need positive radius and permittivity");
  }
  const double k1 = k * std::sqrt(eps_r);
  const double x = k * radius;
  const double x1 = k1 * radius;
  std::vector<cplx> a(2 * n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double jn = bessel_j(n, x);
    const double djn = 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
    const double j1n = bessel_j(n, x1);
    const double dj1n = 0.5 * (bessel_j(n - 1, x1) - bessel_j(n + 1, x1));
    const cplx hn = hankel2(n, x);
    const cplx dhn = 0.5 * (hankel2(n - 1, x) - hankel2(n + 1, x));
    const cplx num = k1 * jn * dj1n - k * djn * j1n;
    const cplx den = k * dhn * j1n - k1 * hn * dj1n;
    a[n_max + n] = num / den;
    a[n_max - n] = a[n_max + n];  // a_{-n} = a_n
  }
  return a;
}

CMatrix mie_reference(double radius, double eps_r, const MeasurementSetup& setup,
                      int extra_orders) {
  const double k = setup.wavenumber;
  const int n_max = static_cast<int>(std::ceil(k * radius)) + extra_orders;
  CMatrix es = CMatrix::Zero(setup.receiver_count(), setup.views());
  if (eps_r == 1.0) return es;
  const std::vector<cplx> a = mie_coefficients(k, radius, eps_r, n_max);
  for (int v = 0; v < setup.views(); ++v) {
    const Point t = setup.transmitters[v];
    const double rt = norm(t);
    const double pt = angle(t);
    for (int m = 0; m < setup.receiver_count(); ++m) {
      const Point r = setup.receivers[m];
      const double rr = norm(r);
      const double pr = angle(r);
      cplx sum = 0.0;
      for (int n = -n_max; n <= n_max; ++n) {
        sum += a[n_max + n] * hankel2(n, k * rt) * hankel2(n, k * rr) *
               std::exp(kJ * (n * (pr - pt)));
      }
      es(m, v) = -0.25 * kJ * sum;
    }
  }
  return es;
}

CMatrix add_noise(const CMatrix& scattered, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return scattered;
  if (!std::isfinite(snr_db)) throw std::invalid_argument("add_noise: SNR must be finite or +inf");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMatrix noisy = scattered;
  const double ratio = std::pow(10.0, -snr_db / 20.0);
  for (Eigen::Index v = 0; v < scattered.cols(); ++v) {
    CVector noise(scattered.rows());
    for (Eigen::Index m = 0; m < noise.size(); ++m) noise[m] = cplx(gauss(rng), gauss(rng));
    const double nn = noise.norm();
    if (nn == 0.0) continue;
    noisy.col(v) += noise * (ratio * scattered.col(v).norm() / nn);
  }
  return noisy;
}

CMatrix restrict_to_coarse(const CMatrix& fine, int fine_n, int factor) {
  if (factor < 1 || fine_n % factor != 0 || fine.rows() != fine_n * fine_n) {
    throw std::invalid_argument("restrict_to_coarse: incompatible refinement");
  }
  const int n = fine_n / factor;
  CMatrix coarse = CMatrix::Zero(n * n, fine.cols());
  const double w = 1.0 / (factor * factor);
  for (int i = 0; i < fine_n; ++i) {
    for (int j = 0; j < fine_n; ++j) {
      coarse.row((i / factor) * n + j / factor) += w * fine.row(i * fine_n + j);
    }
  }
  return coarse;
}

}  // namespace y0scat
