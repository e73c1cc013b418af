#pragma once

#include <optional>
#include <vector>

#include "y0scat/forward.hpp"
#include "y0scat/reduced_field.hpp"

namespace y0scat {

enum class FieldModel { born, y0, ideal };

std::string to_string(FieldModel model);

// Linearised data equation B chi = d, one row per measured (view, receiver).
struct LinearProblem {
  CMatrix kernel;
  CVector data;
  FieldModel model = FieldModel::born;
  int cells_per_side = 0;
};

struct IterationRecord {
  int iteration = 0;
  double phi = 0.0;
  double data_term = 0.0;
  double state_term = 0.0;
  std::optional<double> nmse;
};

struct InversionResult {
  ContrastMap chi;
  std::optional<double> nmse;
  double threshold = 0.0;  // TSVD relative threshold
  int rank = 0;            // retained singular values
  double residual = 0.0;   // relative data misfit
  int iterations = 0;
  std::vector<IterationRecord> history;
};

// B[(v, m), p] = Ae[m, p] * E_approx^v(p). Rows whose entry in `mask` is
// false are dropped.
LinearProblem build_linear(const MultiviewField& approx_field, const CMatrix& ae,
                           const CMatrix& scattered, FieldModel model, int cells_per_side,
                           const DataMask& mask = {});

// |chi - chi_true|^2 / |chi_true|^2. Throws if chi_true vanishes.
double nmse(const ContrastMap& estimate, const ContrastMap& truth);

// Thin SVD of a linear problem, reusable across thresholds.
class TsvdSolver {
 public:
  explicit TsvdSolver(const LinearProblem& problem);

  const Eigen::VectorXd& singular_values() const { return sigma_; }
  // Keeps sigma_i >= threshold * sigma_1; 0 < threshold <= 1.
  InversionResult solve(double threshold) const;

 private:
  int n_ = 0;
  CMatrix v_;
  Eigen::VectorXd sigma_;
  CVector projected_;  // U^H d
  double data_norm_ = 0.0;
};

InversionResult tsvd_solve(const LinearProblem& problem, double threshold);

enum class ThresholdRule { fixed, discrepancy, oracle };

struct ThresholdOptions {
  ThresholdRule rule = ThresholdRule::discrepancy;
  double fixed = 1e-2;
  double min = 1e-3;
  double max = 1e-1;
  int count = 21;
  // Relative noise level |n| / |d| for the discrepancy rule.
  double noise_level = 0.0;
  double tau = 1.0;
};

std::vector<double> threshold_sweep(const ThresholdOptions& options);

// Picks one threshold per the rule. `truth` is required by the oracle rule
// (best NMSE over the sweep) and used for reporting otherwise.
InversionResult tsvd_select(const LinearProblem& problem, const ThresholdOptions& options,
                            const ContrastMap* truth = nullptr);

double relative_noise_level(double snr_db);

// Born: E_t ~ E_i.
InversionResult run_ba(const CMatrix& scattered, const DiscreteOperators& ops,
                       const MeasurementSetup& setup, const ThresholdOptions& options,
                       const ContrastMap* truth = nullptr, const DataMask& mask = {});

// E_J0 from data, reduced incident field, linearised data equation with
// E_t ~ Ehat_i, TSVD.
InversionResult run_y0_ba(const CMatrix& scattered, const DiscreteOperators& ops,
                          const MeasurementSetup& setup, const ThresholdOptions& options,
                          const ContrastMap* truth = nullptr, const DataMask& mask = {},
                          const KernelOptions& kernel = {});

// Benchmark with the exact total field on the inversion grid.
InversionResult run_ideal(const CMatrix& scattered, const CMatrix& total_field,
                          const DiscreteOperators& ops, const ThresholdOptions& options,
                          const ContrastMap* truth = nullptr, const DataMask& mask = {});

}  // namespace y0scat
