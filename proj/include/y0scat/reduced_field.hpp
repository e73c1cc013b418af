#pragma once

#include "y0scat/forward.hpp"
#include "y0scat/operators.hpp"

namespace y0scat {

// Receiver-presence mask (receivers x views). An empty mask means every
// entry is present.
using DataMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Truncated series kernel
//   K(r_m, r) = 1/(2 pi |r_m|) sum_{|n| <= n_max} J_n(k|r|) / H_n^(2)(k|r_m|) e^{jn(phi - phi_m)}
// sampled as receivers x cells.
struct KernelKTM {
  CMatrix values;
  int n_max = 0;
  // True when n_max was lowered to (M-1)/2 because M receivers cannot
  // resolve more harmonics.
  bool limited_by_sampling = false;
};

struct KernelOptions {
  int n_slack = 3;
  bool clamp_to_sampling = true;
};

KernelKTM kernel_ktm(const Grid& grid, const MeasurementSetup& setup,
                     const KernelOptions& options = {});

struct J0Field {
  MultiviewField field;  // kind reduced_j0, cells x views
  int n_max = 0;
  // Set when receivers are non-uniform or entries are missing; the
  // underlying identity then only holds approximately.
  bool degraded = false;
};

// int_D J0(k|r - r'|) W^v(r') dr' on the grid cells, from receiver data
// (receivers x views) by trapezoidal quadrature over the receiver circle.
J0Field e_j0_from_data(const CMatrix& scattered, const Grid& grid, const MeasurementSetup& setup,
                       const KernelOptions& options = {}, const DataMask& mask = {});

// Far-field pattern E^inf defined by E_s(r) ~ E^inf(phi) e^{-jkr} / sqrt(r).
CMatrix far_field_pattern(const CMatrix& scattered, double radius, double k);

// Same integral from a far-field pattern sampled at `directions` (radians,
// uniform over the full circle), one column per view.
J0Field e_j0_far_field(const CMatrix& pattern, const std::vector<double>& directions,
                       const Grid& grid, double k);

// Minimum-norm TSVD solution of Ae W = E_s keeping sigma_i >= threshold * sigma_1.
CMatrix radiating_currents_tsvd(const CMatrix& scattered, const CMatrix& ae, double threshold);

// E_i - j (k^2/4) E_J0.
MultiviewField reduced_incident(const MultiviewField& incident, const MultiviewField& e_j0,
                                double k);

// |chi Ehat + chi AiY0 W - W| / |W| over all views: zero in exact arithmetic
// when Ehat came from exact data.
double y0_state_residual(const CVector& chi, const CMatrix& reduced_incident,
                         const GridConvolution& aiy0, const CMatrix& currents);

}  // namespace y0scat
