#include "y0scat/linear_inv.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace y0scat {

std::string to_string(FieldModel model) {
  switch (model) {
    case FieldModel::born: return "born";
    case FieldModel::y0: return "y0";
    case FieldModel::ideal: return "ideal";
  }
  return "unknown";
}

LinearProblem build_linear(const MultiviewField& approx_field, const CMatrix& ae,
                           const CMatrix& scattered, FieldModel model, int cells_per_side,
                           const DataMask& mask) {
  const CMatrix& e = approx_field.values;
  if (e.rows() != ae.cols() || e.cols() != scattered.cols() || scattered.rows() != ae.rows()) {
    throw std::invalid_argument("build_linear: shape mismatch");
  }
  if (mask.size() != 0 && (mask.rows() != scattered.rows() || mask.cols() != scattered.cols())) {
    throw std::invalid_argument("build_linear: mask shape mismatch");
  }
  const Eigen::Index views = scattered.cols();
  const Eigen::Index receivers = scattered.rows();
  Eigen::Index rows = 0;
  for (Eigen::Index v = 0; v < views; ++v) {
    for (Eigen::Index m = 0; m < receivers; ++m) rows += (mask.size() == 0 || mask(m, v));
  }
  LinearProblem lp;
  lp.model = model;
  lp.cells_per_side = cells_per_side;
  lp.kernel.resize(rows, ae.cols());
  lp.data.resize(rows);
  Eigen::Index r = 0;
  for (Eigen::Index v = 0; v < views; ++v) {
    for (Eigen::Index m = 0; m < receivers; ++m) {
      if (mask.size() != 0 && !mask(m, v)) continue;
      lp.kernel.row(r) = ae.row(m).cwiseProduct(e.col(v).transpose());
      lp.data[r] = scattered(m, v);
      ++r;
    }
  }
  return lp;
}

double nmse(const ContrastMap& estimate, const ContrastMap& truth) {
  if (estimate.values.size() != truth.values.size()) {
    throw std::invalid_argument("nmse: grids differ");
  }
  const double denom = truth.values.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nmse: reference contrast is identically zero");
  return (truth.values - estimate.values).squaredNorm() / denom;
}

TsvdSolver::TsvdSolver(const LinearProblem& problem) : n_(problem.cells_per_side) {
  if (problem.kernel.size() == 0 || problem.kernel.norm() == 0.0) {
    throw std::invalid_argument("tsvd: degenerate all-zero kernel");
  }
  // Thin SVD of B^H is cheaper when B is short and wide.
  if (problem.kernel.rows() < problem.kernel.cols()) {
    Eigen::BDCSVD<CMatrix> svd(problem.kernel.adjoint(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma_ = svd.singularValues();
    v_ = svd.matrixU();
    projected_ = svd.matrixV().adjoint() * problem.data;
  } else {
    Eigen::BDCSVD<CMatrix> svd(problem.kernel, Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma_ = svd.singularValues();
    v_ = svd.matrixV();
    projected_ = svd.matrixU().adjoint() * problem.data;
  }
  data_norm_ = problem.data.norm();
}

InversionResult TsvdSolver::solve(double threshold) const {
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw std::invalid_argument("tsvd: threshold must be in (0, 1]");
  }
  Eigen::Index keep = 0;
  while (keep < sigma_.size() && sigma_[keep] >= threshold * sigma_[0]) ++keep;
  const CVector coeff = projected_.head(keep).cwiseQuotient(sigma_.head(keep).cast<cplx>());
  InversionResult res;
  res.chi = ContrastMap(n_, v_.leftCols(keep) * coeff);
  res.threshold = threshold;
  res.rank = static_cast<int>(keep);
  // Residual: data outside the retained subspace (U is orthonormal).
  const double kept = projected_.head(keep).squaredNorm();
  const double total = data_norm_ * data_norm_;
  res.residual = data_norm_ > 0.0 ? std::sqrt(std::max(0.0, total - kept)) / data_norm_ : 0.0;
  return res;
}

InversionResult tsvd_solve(const LinearProblem& problem, double threshold) {
  return TsvdSolver(problem).solve(threshold);
}

std::vector<double> threshold_sweep(const ThresholdOptions& options) {
  if (options.count < 1 || !(options.min > 0.0) || options.max < options.min || options.max > 1.0) {
    throw std::invalid_argument("threshold sweep: need 0 < min <= max <= 1 and count >= 1");
  }
  std::vector<double> t(options.count);
  for (int i = 0; i < options.count; ++i) {
    const double f = options.count == 1 ? 0.0 : static_cast<double>(i) / (options.count - 1);
    t[i] = options.min * std::pow(options.max / options.min, f);
  }
  return t;
}

double relative_noise_level(double snr_db) {
  if (std::isinf(snr_db)) return 0.0;
  // data = signal + noise with |noise| = |signal| 10^{-snr/20}; for
  // independent noise |d|^2 ~ |s|^2 + |n|^2.
  const double r = std::pow(10.0, -snr_db / 20.0);
  return r / std::sqrt(1.0 + r * r);
}

InversionResult tsvd_select(const LinearProblem& problem, const ThresholdOptions& options,
                            const ContrastMap* truth) {
  const TsvdSolver solver(problem);
  auto finish = [&](InversionResult r) {
    if (truth) r.nmse = nmse(r.chi, *truth);
    return r;
  };
  if (options.rule == ThresholdRule::fixed) return finish(solver.solve(options.fixed));

  const std::vector<double> sweep = threshold_sweep(options);
  if (options.rule == ThresholdRule::oracle) {
    if (!truth) throw std::invalid_argument("tsvd_select: oracle rule needs the true contrast");
    InversionResult best;
    double best_err = std::numeric_limits<double>::infinity();
    for (double t : sweep) {
      InversionResult r = finish(solver.solve(t));
      if (*r.nmse < best_err) {
        best_err = *r.nmse;
        best = std::move(r);
      }
    }
    return best;
  }
  // Discrepancy principle: the most regularised solution whose residual
  // reaches the noise level; the smallest residual if none does.
  const double target = options.tau * options.noise_level;
  InversionResult chosen;
  bool found = false;
  for (auto it = sweep.rbegin(); it != sweep.rend(); ++it) {
    InversionResult r = solver.solve(*it);
    if (r.residual <= target) {
      chosen = std::move(r);
      found = true;
      break;
    }
  }
  if (!found) chosen = solver.solve(sweep.front());
  return finish(std::move(chosen));
}

InversionResult run_ba(const CMatrix& scattered, const DiscreteOperators& ops,
                       const MeasurementSetup& setup, const ThresholdOptions& options,
                       const ContrastMap* truth, const DataMask& mask) {
  const MultiviewField ei = incident_field(ops.grid, setup);
  return tsvd_select(build_linear(ei, ops.Ae, scattered, FieldModel::born, ops.grid.n(), mask),
                     options, truth);
}

InversionResult run_y0_ba(const CMatrix& scattered, const DiscreteOperators& ops,
                          const MeasurementSetup& setup, const ThresholdOptions& options,
                          const ContrastMap* truth, const DataMask& mask,
                          const KernelOptions& kernel) {
  const MultiviewField ei = incident_field(ops.grid, setup);
  const J0Field ej0 = e_j0_from_data(scattered, ops.grid, setup, kernel, mask);
  const MultiviewField ehat = reduced_incident(ei, ej0.field, ops.k);
  return tsvd_select(build_linear(ehat, ops.Ae, scattered, FieldModel::y0, ops.grid.n(), mask),
                     options, truth);
}

InversionResult run_ideal(const CMatrix& scattered, const CMatrix& total_field,
                          const DiscreteOperators& ops, const ThresholdOptions& options,
                          const ContrastMap* truth, const DataMask& mask) {
  const MultiviewField et{FieldKind::total, total_field};
  return tsvd_select(build_linear(et, ops.Ae, scattered, FieldModel::ideal, ops.grid.n(), mask),
                     options, truth);
}

}  // namespace y0scat
