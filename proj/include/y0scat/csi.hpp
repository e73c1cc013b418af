#pragma once

#include <vector>

#include "y0scat/linear_inv.hpp"
#include "y0scat/reduced_field.hpp"

namespace y0scat {

enum class CsiModel { h02, y0 };

std::string to_string(CsiModel model);

// Everything the CSI functional needs besides the unknowns. For the h02
// model `internal` is Ai and `incident` is E_i; for y0 they are AiY0 and the
// reduced incident field.
struct CsiProblem {
  CsiModel model = CsiModel::h02;
  Grid grid{1.0, 2};
  GridConvolution internal;
  CMatrix incident;  // cells x views
  CMatrix ae;        // receivers x cells
  CMatrix data;      // receivers x views, zero where masked
  DataMask mask;     // empty: all present
  std::vector<double> state_norm;  // |incident^v|^2
  std::vector<double> data_norm;   // |data^v|^2
};

CsiProblem make_csi_problem(CsiModel model, const CMatrix& data, const DiscreteOperators& ops,
                            const MeasurementSetup& setup, const DataMask& mask = {},
                            const KernelOptions& kernel = {});

struct CsiState {
  CsiModel model = CsiModel::h02;
  CMatrix W;     // contrast sources, cells x views
  ContrastMap chi;
  CMatrix AW;    // internal operator applied to W, kept in sync
  double phi = 0.0;
  double data_term = 0.0;
  double state_term = 0.0;
  int iteration = 0;
};

struct CsiTerms {
  double phi = 0.0;
  double data_term = 0.0;
  double state_term = 0.0;
};

// Phi(W, chi) = sum_v |chi E^v + chi A W^v - W^v|^2 / |E^v|^2
//             + sum_v |E_s^v - Ae W^v|^2 / |E_s^v|^2.
CsiTerms csi_functional(const CMatrix& W, const ContrastMap& chi, const CsiProblem& problem);

// 2 dPhi/d conj(W), one column per view.
CMatrix gradient_w(const CMatrix& W, const ContrastMap& chi, const CsiProblem& problem);

// W^v = alpha_v Ae^H E_s^v with alpha_v minimising the data misfit.
CMatrix backpropagation_init(const CMatrix& data, const CMatrix& ae, const DataMask& mask = {});

// Cellwise weighted least squares for the state residual:
//   chi_p = sum_v w_v W_p conj(E_p) / sum_v w_v |E_p|^2.
// Cells where every field sample vanishes get chi = 0 and are counted in
// `zero_cells` when given.
ContrastMap update_chi(const CMatrix& W, const CMatrix& fields, const std::vector<double>& weights,
                       int cells_per_side, int* zero_cells = nullptr);

struct TvPenalty {
  double value = 0.0;
  CVector gradient;  // 2 dPhi_P / d conj(chi)
};

// (k^2/2)(|eta D_h chi|^2 + |eta D_v chi|^2), k = 1/N_c, forward
// differences divided by the cell size, zero across the last row/column.
TvPenalty tv_penalty(const ContrastMap& chi, const Eigen::VectorXd& eta, const Grid& grid);

// eta = (|grad chi_prev|^2 + delta^2)^{-1/2}, delta^2 the mean squared
// gradient of chi_prev (or 1 / cell_area^2 if chi_prev is flat).
Eigen::VectorXd tv_weights(const ContrastMap& previous, const Grid& grid);

struct CsiOptions {
  int max_iterations = 2000;
  double tolerance = 1e-6;  // relative change of Phi
  bool total_variation = false;
  double tv_scale = 1.0;
  bool passivity = false;   // project Re chi >= 0, Im chi <= 0
  const ContrastMap* truth = nullptr;
};

CsiState initial_state(const CsiProblem& problem);

// Alternating Polak-Ribiere CG step on W with exact complex line search,
// then a chi update. Throws std::runtime_error when Phi turns non-finite.
InversionResult csi_iterate(CsiState& state, const CsiProblem& problem, const CsiOptions& options);

InversionResult run_csi(CsiModel model, const CMatrix& data, const DiscreteOperators& ops,
                        const MeasurementSetup& setup, const CsiOptions& options,
                        const DataMask& mask = {}, const KernelOptions& kernel = {});

}  // namespace y0scat
