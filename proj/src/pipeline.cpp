#include "y0scat/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <stdexcept>

#include "y0scat/matrix_io.hpp"

namespace y0scat {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

PreparedData prepare(const Scenario& s) {
  PreparedData d;
  const double lambda = wavelength(s.setup.frequency_hz);
  const double side = s.scene.side_wavelengths * lambda;
  d.grid = Grid(side, s.scene.cells);
  if (s.scene.phantom) {
    d.setup = make_setup(s.setup.frequency_hz, s.setup.radius_wavelengths * lambda,
                         s.setup.transmitters, s.setup.receivers, side);
    const Phantom phantom = make_phantom(s, lambda);
    const int factor = s.scene.forward_refinement;
    const Grid fine(side, s.scene.cells * factor);
    const ContrastMap chi_fine = rasterize(phantom, fine);
    const ForwardSolution sol = solve_forward(chi_fine, fine, d.setup);
    d.truth = rasterize(phantom, d.grid);
    d.scattered_clean = sol.scattered.values;
    d.scattered = std::isfinite(s.noise.snr_db)
                      ? add_noise(sol.scattered.values, s.noise.snr_db, s.noise.seed)
                      : sol.scattered.values;
    d.total_coarse = restrict_to_coarse(sol.total.values, fine.n(), factor);
    d.currents_coarse = restrict_to_coarse(sol.currents.values, fine.n(), factor);
  } else {
    const FresnelDataset data = parse_fresnel(s.scene.data_file, s.setup.frequency_hz);
    d.setup = fresnel_setup(data, side);
    d.calibration = calibrate(data, d.setup);
    d.scattered = calibrated_scattered(data, *d.calibration);
    d.scattered_clean = d.scattered;
    d.mask = data.present;
    d.limited_aspect = data.limited_aspect;
  }
  d.ops = assemble(d.grid, d.setup);
  return d;
}

InversionResult run_method(const Scenario& s, const PreparedData& d) {
  const ContrastMap* truth = d.truth ? &*d.truth : nullptr;
  ThresholdOptions threshold = s.method.threshold;
  if (threshold.rule == ThresholdRule::discrepancy && !(threshold.noise_level > 0.0)) {
    threshold.noise_level = std::isfinite(s.noise.snr_db) ? relative_noise_level(s.noise.snr_db) : 0.0;
  }
  switch (s.method.name) {
    case Method::ba: return run_ba(d.scattered, d.ops, d.setup, threshold, truth, d.mask);
    case Method::y0ba:
      return run_y0_ba(d.scattered, d.ops, d.setup, threshold, truth, d.mask, s.method.kernel);
    case Method::ideal:
      if (!d.total_coarse) throw std::invalid_argument("method 'ideal' needs a phantom");
      return run_ideal(d.scattered, *d.total_coarse, d.ops, threshold, truth, d.mask);
    case Method::csi:
    case Method::y0csi: {
      CsiOptions o;
      o.max_iterations = s.method.max_iterations;
      o.tolerance = s.method.tolerance;
      o.total_variation = s.method.total_variation;
      o.passivity = s.method.passivity;
      o.truth = truth;
      const CsiModel model = s.method.name == Method::csi ? CsiModel::h02 : CsiModel::y0;
      return run_csi(model, d.scattered, d.ops, d.setup, o, d.mask, s.method.kernel);
    }
  }
  throw std::invalid_argument("unsupported method");
}

std::string metrics_json(const Scenario& s, const PreparedData& d, const InversionResult& r) {
  nlohmann::ordered_json j;
  j["scenario"] = s.name;
  j["method"] = to_string(s.method.name);
  j["cells_per_side"] = d.grid.n();
  j["side_length_m"] = d.grid.side_length();
  j["frequency_hz"] = d.setup.frequency;
  j["wavelength_m"] = d.setup.wavelength;
  j["transmitters"] = d.setup.views();
  j["receivers"] = d.setup.receiver_count();
  if (std::isfinite(s.noise.snr_db)) {
    j["snr_db"] = s.noise.snr_db;
  } else {
    j["snr_db"] = nullptr;
  }
  j["seed"] = s.noise.seed;
  j["nmse"] = r.nmse ? nlohmann::ordered_json(*r.nmse) : nlohmann::ordered_json(nullptr);
  if (s.method.name == Method::csi || s.method.name == Method::y0csi) {
    j["iterations"] = r.iterations;
    j["phi"] = r.history.empty() ? 0.0 : r.history.back().phi;
    j["data_term"] = r.history.empty() ? 0.0 : r.history.back().data_term;
    j["state_term"] = r.history.empty() ? 0.0 : r.history.back().state_term;
  } else {
    j["threshold"] = r.threshold;
    j["rank"] = r.rank;
    j["relative_residual"] = r.residual;
  }
  if (d.calibration) {
    j["calibration"] = {{"re", d.calibration->factor.real()},
                        {"im", d.calibration->factor.imag()},
                        {"samples", d.calibration->samples}};
    j["limited_aspect"] = d.limited_aspect;
  }
  return j.dump(2) + "\n";
}

J0Check validate_ej0(const Scenario& s) {
  if (!s.scene.phantom) throw std::invalid_argument("validate-ej0 needs a phantom scenario");
  const double lambda = wavelength(s.setup.frequency_hz);
  const double side = s.scene.side_wavelengths * lambda;
  const MeasurementSetup setup = make_setup(s.setup.frequency_hz, s.setup.radius_wavelengths * lambda,
                                            s.setup.transmitters, s.setup.receivers, side);
  const Grid fine(side, s.scene.cells * s.scene.forward_refinement);
  const ContrastMap chi = rasterize(make_phantom(s, lambda), fine);
  const DiscreteOperators ops = assemble(fine, setup);
  const ForwardSolution sol = solve_forward(chi, ops, setup);
  const CMatrix data = std::isfinite(s.noise.snr_db)
                           ? add_noise(sol.scattered.values, s.noise.snr_db, s.noise.seed)
                           : sol.scattered.values;
  const J0Field from_data = e_j0_from_data(data, fine, setup, s.method.kernel);
  const cplx scale = 4.0 * kJ / (ops.k * ops.k);
  const CMatrix from_currents = scale * ops.AiJ0.apply(sol.currents.values);
  J0Check c;
  c.relative_error = (from_data.field.values - from_currents).norm() / from_currents.norm();
  c.n_max = from_data.n_max;
  c.cells_per_side = fine.n();
  const MultiviewField ehat =
      reduced_incident(sol.incident, from_data.field, ops.k);
  c.state_residual = y0_state_residual(chi.values, ehat.values, ops.AiY0, sol.currents.values);
  return c;
}

void write_iterations_csv(const InversionResult& r, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "iteration,phi,data_term,state_term,nmse\n";
  for (const IterationRecord& h : r.history) {
    out << h.iteration << ',' << num(h.phi) << ',' << num(h.data_term) << ',' << num(h.state_term)
        << ',' << (h.nmse ? num(*h.nmse) : "") << '\n';
  }
}

void write_chi_map_csv(const ContrastMap& estimate, const ContrastMap* truth, const Grid& grid,
                       double wavelength, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "x_over_lambda,y_over_lambda,re_chi,im_chi";
  if (truth) out << ",re_chi_true,im_chi_true";
  out << '\n';
  for (int p = 0; p < grid.cell_count(); ++p) {
    const Point c = grid.center(p);
    out << num(c.x / wavelength) << ',' << num(c.y / wavelength) << ','
        << num(estimate.values[p].real()) << ',' << num(estimate.values[p].imag());
    if (truth) out << ',' << num(truth->values[p].real()) << ',' << num(truth->values[p].imag());
    out << '\n';
  }
}

void write_norm_sweep_csv(const NormSweep& sweep, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "radius_over_lambda,norm_ai,norm_aiy0,cells\n";
  for (std::size_t i = 0; i < sweep.radius_over_lambda.size(); ++i) {
    out << num(sweep.radius_over_lambda[i]) << ',' << num(sweep.norm_ai[i]) << ','
        << num(sweep.norm_aiy0[i]) << ',' << sweep.cells[i] << '\n';
  }
}

ScenarioOutcome run_scenario(const Scenario& s, bool write_files) {
  ScenarioOutcome o;
  o.data = prepare(s);
  o.result = run_method(s, o.data);
  o.metrics_json = metrics_json(s, o.data, o.result);
  if (!write_files) return o;

  namespace fs = std::filesystem;
  const fs::path dir(s.output_directory);
  fs::create_directories(dir);
  const double lambda = o.data.setup.wavelength;
  export_matrix({to_matrix(o.result.chi), o.data.grid.side_length(), lambda},
                (dir / "chi.txt").string());
  if (o.data.truth) {
    export_matrix({to_matrix(*o.data.truth), o.data.grid.side_length(), lambda},
                  (dir / "chi_true.txt").string());
  }
  write_chi_map_csv(o.result.chi, o.data.truth ? &*o.data.truth : nullptr, o.data.grid, lambda,
                    (dir / "chi_map.csv").string());
  if (!o.result.history.empty()) write_iterations_csv(o.result, (dir / "iterations.csv").string());
  open_out((dir / "metrics.json").string()) << o.metrics_json;
  return o;
}

}  // namespace y0scat
