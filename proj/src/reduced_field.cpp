#include "y0scat/reduced_field.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "y0scat/specfun.hpp"

namespace y0scat {

KernelKTM kernel_ktm(const Grid& grid, const MeasurementSetup& setup, const KernelOptions& options) {
  const double k = setup.wavenumber;
  const double rm = setup.rx_radius;
  if (!(rm > 0.0)) throw std::invalid_argument("kernel_ktm: receivers at the origin");
  for (const Point& r : setup.receivers) {
    if (std::abs(norm(r) - rm) > 1e-9 * rm) {
      throw std::invalid_argument("kernel_ktm: receivers must lie on a circle");
    }
  }
  KernelKTM out;
  out.n_max = static_cast<int>(std::ceil(k * setup.enclosing_radius)) + options.n_slack;
  const int m_count = setup.receiver_count();
  if (options.clamp_to_sampling && m_count < 2 * out.n_max + 1) {
    out.n_max = (m_count - 1) / 2;
    out.limited_by_sampling = true;
  }
  const int n_max = out.n_max;
  std::vector<cplx> inv_h(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const cplx h = hankel2(n, k * rm);
    if (h == 0.0) throw std::domain_error("kernel_ktm: vanishing Hankel function");
    inv_h[n] = 1.0 / h;
  }
  const double pre = 1.0 / (2.0 * kPi * rm);
  out.values.resize(m_count, grid.cell_count());
  std::vector<double> jn(n_max + 1);
  for (int p = 0; p < grid.cell_count(); ++p) {
    const Point c = grid.center(p);
    const double rp = norm(c);
    const double phi = angle(c);
    for (int n = 0; n <= n_max; ++n) jn[n] = bessel_j(n, k * rp);
    for (int m = 0; m < m_count; ++m) {
      const double dphi = phi - angle(setup.receivers[m]);
      // H_{-n} J_{-n} pairs reduce to the same ratio as for +n
      cplx sum = jn[0] * inv_h[0];
      for (int n = 1; n <= n_max; ++n) sum += 2.0 * jn[n] * inv_h[n] * std::cos(n * dphi);
      out.values(m, p) = pre * sum;
    }
  }
  return out;
}

J0Field e_j0_from_data(const CMatrix& scattered, const Grid& grid, const MeasurementSetup& setup,
                       const KernelOptions& options, const DataMask& mask) {
  if (scattered.rows() != setup.receiver_count()) {
    throw std::invalid_argument("e_j0_from_data: data rows do not match receivers");
  }
  const KernelKTM kernel = kernel_ktm(grid, setup, options);
  const double k = setup.wavenumber;
  const double weight = 2.0 * kPi * setup.rx_radius / setup.receiver_count();
  // The series inverts H0-normalised data; dividing by the Green's function
  // prefactor -(j k^2/4) leaves the raw J0 integral.
  const cplx scale = weight / (-0.25 * kJ * k * k);
  CMatrix data = scattered;
  bool missing = false;
  if (mask.size() != 0) {
    if (mask.rows() != scattered.rows() || mask.cols() != scattered.cols()) {
      throw std::invalid_argument("e_j0_from_data: mask shape mismatch");
    }
    for (Eigen::Index v = 0; v < data.cols(); ++v) {
      for (Eigen::Index m = 0; m < data.rows(); ++m) {
        if (!mask(m, v)) {
          data(m, v) = 0.0;
          missing = true;
        }
      }
    }
  }
  J0Field out;
  out.field = {FieldKind::reduced_j0, scale * (kernel.values.transpose() * data)};
  out.n_max = kernel.n_max;
  out.degraded = missing || !setup.uniform_receivers;
  return out;
}

CMatrix far_field_pattern(const CMatrix& scattered, double radius, double k) {
  return scattered * (std::sqrt(radius) * std::exp(kJ * (k * radius)));
}

J0Field e_j0_far_field(const CMatrix& pattern, const std::vector<double>& directions,
                       const Grid& grid, double k) {
  if (pattern.rows() != static_cast<Eigen::Index>(directions.size())) {
    throw std::invalid_argument("e_j0_far_field: pattern rows do not match directions");
  }
  // E^inf = -(j k^2/4) sqrt(2/(pi k)) e^{j pi/4} int e^{jk rhat.r'} W dr'
  const cplx c = -0.25 * kJ * k * k * std::sqrt(2.0 / (kPi * k)) * std::exp(kJ * (0.25 * kPi));
  const double dphi = 2.0 * kPi / directions.size();
  CMatrix test(grid.cell_count(), directions.size());
  for (int p = 0; p < grid.cell_count(); ++p) {
    const Point r = grid.center(p);
    for (std::size_t m = 0; m < directions.size(); ++m) {
      const double proj = r.x * std::cos(directions[m]) + r.y * std::sin(directions[m]);
      test(p, m) = std::exp(-kJ * (k * proj));
    }
  }
  J0Field out;
  out.field = {FieldKind::reduced_j0, (dphi / (2.0 * kPi * c)) * (test * pattern)};
  return out;
}

CMatrix radiating_currents_tsvd(const CMatrix& scattered, const CMatrix& ae, double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw std::invalid_argument("radiating_currents_tsvd: threshold must be in (0, 1]");
  }
  Eigen::BDCSVD<CMatrix> svd(ae, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::Index keep = 0;
  while (keep < s.size() && s[keep] >= threshold * s[0]) ++keep;
  const CMatrix coeff =
      s.head(keep).cwiseInverse().asDiagonal() * (svd.matrixU().leftCols(keep).adjoint() * scattered);
  return svd.matrixV().leftCols(keep) * coeff;
}

MultiviewField reduced_incident(const MultiviewField& incident, const MultiviewField& e_j0,
                                double k) {
  if (incident.values.rows() != e_j0.values.rows() || incident.values.cols() != e_j0.values.cols()) {
    throw std::invalid_argument("reduced_incident: shape mismatch");
  }
  return {FieldKind::reduced_incident, incident.values - kJ * (0.25 * k * k) * e_j0.values};
}

double y0_state_residual(const CVector& chi, const CMatrix& reduced, const GridConvolution& aiy0,
                         const CMatrix& currents) {
  const CMatrix r = chi.asDiagonal() * (reduced + aiy0.apply(currents)) - currents;
  const double wn = currents.norm();
  return wn > 0.0 ? r.norm() / wn : r.norm();
}

}  // namespace y0scat
