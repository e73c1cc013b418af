#include "y0scat/csi.hpp"

#include <cmath>
#include <stdexcept>

namespace y0scat {

std::string to_string(CsiModel model) { return model == CsiModel::h02 ? "h02" : "y0"; }

namespace {

CMatrix apply_mask(CMatrix m, const DataMask& mask) {
  if (mask.size() == 0) return m;
  for (Eigen::Index v = 0; v < m.cols(); ++v) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!mask(r, v)) m(r, v) = 0.0;
    }
  }
  return m;
}

std::vector<double> column_norms(const CMatrix& m, const char* what) {
  std::vector<double> out(m.cols());
  for (Eigen::Index v = 0; v < m.cols(); ++v) {
    out[v] = m.col(v).squaredNorm();
    if (!(out[v] > 0.0)) {
      throw std::invalid_argument(std::string("CSI: zero normaliser in ") + what + " for view " +
                                  std::to_string(v));
    }
  }
  return out;
}

std::vector<double> inverse(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 1.0 / v[i];
  return out;
}

CsiTerms terms_from(const CMatrix& W, const CMatrix& AW, const ContrastMap& chi,
                    const CsiProblem& pb) {
  CsiTerms t;
  const CMatrix data_res = apply_mask(pb.data - pb.ae * W, pb.mask);
  for (Eigen::Index v = 0; v < W.cols(); ++v) {
    const CVector state =
        chi.values.cwiseProduct(pb.incident.col(v) + AW.col(v)) - W.col(v);
    t.state_term += state.squaredNorm() / pb.state_norm[v];
    t.data_term += data_res.col(v).squaredNorm() / pb.data_norm[v];
  }
  t.phi = t.state_term + t.data_term;
  return t;
}

CMatrix gradient_from(const CMatrix& W, const CMatrix& AW, const ContrastMap& chi,
                      const CsiProblem& pb) {
  const CMatrix data_res = apply_mask(pb.data - pb.ae * W, pb.mask);
  const CMatrix back = pb.ae.adjoint() * data_res;
  CMatrix g(W.rows(), W.cols());
  for (Eigen::Index v = 0; v < W.cols(); ++v) {
    const CVector state =
        chi.values.cwiseProduct(pb.incident.col(v) + AW.col(v)) - W.col(v);
    const CVector adj = pb.internal.apply_adjoint(CVector(chi.values.conjugate().cwiseProduct(state)));
    g.col(v) = (-2.0 / pb.data_norm[v]) * back.col(v) - (2.0 / pb.state_norm[v]) * (state - adj);
  }
  return g;
}

// Conjugate gradients for (diag(a) + tv) chi = b with the TV operator
// applied through tv_penalty; starts from chi and only decreases the
// quadratic objective.
CVector solve_chi_with_tv(const Eigen::VectorXd& a, const CVector& b, CVector chi,
                          const Eigen::VectorXd& eta, const Grid& grid, double scale) {
  auto op = [&](const CVector& x) -> CVector {
    const TvPenalty p = tv_penalty(ContrastMap(grid.n(), x), eta, grid);
    return 2.0 * a.cast<cplx>().cwiseProduct(x) + scale * p.gradient;
  };
  const CVector rhs = 2.0 * b;
  CVector r = rhs - op(chi);
  CVector d = r;
  double rr = r.squaredNorm();
  const double stop = 1e-20 * rhs.squaredNorm();
  for (int it = 0; it < 200 && rr > stop; ++it) {
    const CVector ad = op(d);
    const double dad = d.dot(ad).real();
    if (!(dad > 0.0)) break;
    const double alpha = rr / dad;
    chi += alpha * d;
    r -= alpha * ad;
    const double next = r.squaredNorm();
    d = r + (next / rr) * d;
    rr = next;
  }
  return chi;
}

void project_passive(ContrastMap& chi) {
  for (Eigen::Index p = 0; p < chi.values.size(); ++p) {
    chi.values[p] = cplx(std::max(0.0, chi.values[p].real()), std::min(0.0, chi.values[p].imag()));
  }
}

}  // namespace

CsiProblem make_csi_problem(CsiModel model, const CMatrix& data, const DiscreteOperators& ops,
                            const MeasurementSetup& setup, const DataMask& mask,
                            const KernelOptions& kernel) {
  CsiProblem pb;
  pb.model = model;
  pb.grid = ops.grid;
  pb.ae = ops.Ae;
  pb.mask = mask;
  pb.data = apply_mask(data, mask);
  const MultiviewField ei = incident_field(ops.grid, setup);
  if (model == CsiModel::h02) {
    pb.internal = ops.Ai;
    pb.incident = ei.values;
  } else {
    const J0Field ej0 = e_j0_from_data(data, ops.grid, setup, kernel, mask);
    pb.internal = ops.AiY0;
    pb.incident = reduced_incident(ei, ej0.field, ops.k).values;
  }
  pb.state_norm = column_norms(pb.incident, "incident field");
  pb.data_norm = column_norms(pb.data, "data");
  return pb;
}

CsiTerms csi_functional(const CMatrix& W, const ContrastMap& chi, const CsiProblem& problem) {
  if (W.rows() != problem.incident.rows() || W.cols() != problem.incident.cols()) {
    throw std::invalid_argument("csi_functional: W shape mismatch");
  }
  return terms_from(W, problem.internal.apply(W), chi, problem);
}

CMatrix gradient_w(const CMatrix& W, const ContrastMap& chi, const CsiProblem& problem) {
  return gradient_from(W, problem.internal.apply(W), chi, problem);
}

CMatrix backpropagation_init(const CMatrix& data, const CMatrix& ae, const DataMask& mask) {
  const CMatrix d = apply_mask(data, mask);
  CMatrix w = ae.adjoint() * d;
  for (Eigen::Index v = 0; v < d.cols(); ++v) {
    const CVector aw = apply_mask(ae * w.col(v), mask.size() ? DataMask(mask.col(v)) : DataMask());
    const double den = aw.squaredNorm();
    // <Ae Ae^H d, d> = |Ae^H d|^2 is real
    const double alpha = den > 0.0 ? w.col(v).squaredNorm() / den : 0.0;
    w.col(v) *= alpha;
  }
  return w;
}

ContrastMap update_chi(const CMatrix& W, const CMatrix& fields, const std::vector<double>& weights,
                       int cells_per_side, int* zero_cells) {
  if (W.rows() != fields.rows() || W.cols() != fields.cols() ||
      static_cast<Eigen::Index>(weights.size()) != W.cols()) {
    throw std::invalid_argument("update_chi: shape mismatch");
  }
  ContrastMap chi(cells_per_side, CVector::Zero(W.rows()));
  int zeros = 0;
  for (Eigen::Index p = 0; p < W.rows(); ++p) {
    cplx num = 0.0;
    double den = 0.0;
    for (Eigen::Index v = 0; v < W.cols(); ++v) {
      num += weights[v] * W(p, v) * std::conj(fields(p, v));
      den += weights[v] * std::norm(fields(p, v));
    }
    if (den > 0.0) {
      chi.values[p] = num / den;
    } else {
      ++zeros;
    }
  }
  if (zero_cells) *zero_cells = zeros;
  return chi;
}

TvPenalty tv_penalty(const ContrastMap& chi, const Eigen::VectorXd& eta, const Grid& grid) {
  const int n = grid.n();
  if (chi.values.size() != grid.cell_count() || eta.size() != grid.cell_count()) {
    throw std::invalid_argument("tv_penalty: size mismatch");
  }
  const double k = 1.0 / grid.cell_count();
  const double inv_d = 1.0 / grid.cell_size();
  CVector dh = CVector::Zero(grid.cell_count());
  CVector dv = CVector::Zero(grid.cell_count());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int p = i * n + j;
      if (j + 1 < n) dh[p] = (chi.values[p + 1] - chi.values[p]) * inv_d;
      if (i + 1 < n) dv[p] = (chi.values[p + n] - chi.values[p]) * inv_d;
    }
  }
  const Eigen::VectorXd eta2 = eta.cwiseAbs2();
  TvPenalty out;
  out.value = 0.5 * k * k *
              (eta2.cwiseProduct(dh.cwiseAbs2()).sum() + eta2.cwiseProduct(dv.cwiseAbs2()).sum());
  // gradient: k^2 (D_h^T eta^2 D_h chi + D_v^T eta^2 D_v chi)
  const CVector wh = eta2.cast<cplx>().cwiseProduct(dh);
  const CVector wv = eta2.cast<cplx>().cwiseProduct(dv);
  out.gradient = CVector::Zero(grid.cell_count());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int p = i * n + j;
      if (j + 1 < n) {
        out.gradient[p + 1] += wh[p] * inv_d;
        out.gradient[p] -= wh[p] * inv_d;
      }
      if (i + 1 < n) {
        out.gradient[p + n] += wv[p] * inv_d;
        out.gradient[p] -= wv[p] * inv_d;
      }
    }
  }
  out.gradient *= k * k;
  return out;
}

Eigen::VectorXd tv_weights(const ContrastMap& previous, const Grid& grid) {
  const int n = grid.n();
  const double inv_d = 1.0 / grid.cell_size();
  Eigen::VectorXd g2(grid.cell_count());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int p = i * n + j;
      const double h = j + 1 < n ? std::norm((previous.values[p + 1] - previous.values[p]) * inv_d) : 0.0;
      const double v = i + 1 < n ? std::norm((previous.values[p + n] - previous.values[p]) * inv_d) : 0.0;
      g2[p] = h + v;
    }
  }
  double delta2 = g2.mean();
  if (!(delta2 > 0.0)) delta2 = inv_d * inv_d * inv_d * inv_d * grid.cell_area() * grid.cell_area();
  return (g2.array() + delta2).rsqrt().matrix();
}

CsiState initial_state(const CsiProblem& problem) {
  CsiState s;
  s.model = problem.model;
  s.W = backpropagation_init(problem.data, problem.ae, problem.mask);
  s.AW = problem.internal.apply(s.W);
  s.chi = update_chi(s.W, problem.incident + s.AW, inverse(problem.state_norm), problem.grid.n());
  const CsiTerms t = terms_from(s.W, s.AW, s.chi, problem);
  s.phi = t.phi;
  s.data_term = t.data_term;
  s.state_term = t.state_term;
  return s;
}

InversionResult csi_iterate(CsiState& state, const CsiProblem& pb, const CsiOptions& options) {
  const Eigen::Index views = state.W.cols();
  const std::vector<double> weights = inverse(pb.state_norm);
  CMatrix g_prev, d_prev;
  Eigen::VectorXd eta;
  if (options.total_variation) eta = tv_weights(state.chi, pb.grid);

  InversionResult result;
  auto record = [&](double phi, double data_term, double state_term) {
    IterationRecord r{state.iteration, phi, data_term, state_term, {}};
    if (options.truth) r.nmse = nmse(state.chi, *options.truth);
    result.history.push_back(r);
  };
  record(state.phi, state.data_term, state.state_term);

  for (int it = 0; it < options.max_iterations; ++it) {
    const CMatrix g = gradient_from(state.W, state.AW, state.chi, pb);
    CMatrix d(g.rows(), g.cols());
    for (Eigen::Index v = 0; v < views; ++v) {
      double gamma = 0.0;
      if (g_prev.size() != 0) {
        const double den = g_prev.col(v).squaredNorm();
        if (den > 0.0) {
          gamma = std::max(0.0, g.col(v).dot(g.col(v) - g_prev.col(v)).real() / den);
        }
      }
      d.col(v) = -g.col(v);
      if (gamma > 0.0) d.col(v) += gamma * d_prev.col(v);
    }
    const CMatrix data_res = apply_mask(pb.data - pb.ae * state.W, pb.mask);
    const CMatrix ae_d = apply_mask(pb.ae * d, pb.mask);
    for (Eigen::Index v = 0; v < views; ++v) {
      const CVector ad = pb.internal.apply(CVector(d.col(v)));
      const CVector state_res =
          state.chi.values.cwiseProduct(pb.incident.col(v) + state.AW.col(v)) - state.W.col(v);
      const CVector ld = d.col(v) - state.chi.values.cwiseProduct(ad);
      const double ws = 1.0 / pb.state_norm[v];
      const double wd = 1.0 / pb.data_norm[v];
      const cplx num = ws * ld.dot(state_res) + wd * ae_d.col(v).dot(data_res.col(v));
      const double den = ws * ld.squaredNorm() + wd * ae_d.col(v).squaredNorm();
      if (!(den > 0.0)) continue;
      const cplx alpha = num / den;
      state.W.col(v) += alpha * d.col(v);
      state.AW.col(v) += alpha * ad;
    }
    g_prev = g;
    d_prev = d;

    const CMatrix fields = pb.incident + state.AW;
    ContrastMap next = update_chi(state.W, fields, weights, pb.grid.n());
    double penalty = 0.0;
    if (options.total_variation) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(fields.rows());
      CVector b = CVector::Zero(fields.rows());
      for (Eigen::Index v = 0; v < views; ++v) {
        a += weights[v] * fields.col(v).cwiseAbs2();
        b += weights[v] * state.W.col(v).cwiseProduct(fields.col(v).conjugate());
      }
      next.values = solve_chi_with_tv(a, b, state.chi.values, eta, pb.grid, options.tv_scale);
    }
    if (options.passivity) project_passive(next);
    state.chi = std::move(next);
    if (options.total_variation) {
      penalty = options.tv_scale * tv_penalty(state.chi, eta, pb.grid).value;
      eta = tv_weights(state.chi, pb.grid);
    }

    const CsiTerms t = terms_from(state.W, state.AW, state.chi, pb);
    const double previous = state.phi;
    state.phi = t.phi + penalty;
    state.data_term = t.data_term;
    state.state_term = t.state_term;
    ++state.iteration;
    if (!std::isfinite(state.phi)) {
      throw std::runtime_error("CSI diverged: non-finite functional at iteration " +
                               std::to_string(state.iteration));
    }
    record(state.phi, state.data_term, state.state_term);
    if (previous > 0.0 && std::abs(previous - state.phi) <= options.tolerance * previous) break;
  }

  result.chi = state.chi;
  result.iterations = state.iteration;
  result.residual = std::sqrt(state.data_term / views);
  if (options.truth) result.nmse = nmse(state.chi, *options.truth);
  return result;
}

InversionResult run_csi(CsiModel model, const CMatrix& data, const DiscreteOperators& ops,
                        const MeasurementSetup& setup, const CsiOptions& options,
                        const DataMask& mask, const KernelOptions& kernel) {
  const CsiProblem pb = make_csi_problem(model, data, ops, setup, mask, kernel);
  CsiState state = initial_state(pb);
  return csi_iterate(state, pb, options);
}

}  // namespace y0scat
