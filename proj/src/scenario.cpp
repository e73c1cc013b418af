#include "y0scat/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace y0scat {

namespace pt = boost::property_tree;

std::string to_string(Method method) {
  switch (method) {
    case Method::ba: return "ba";
    case Method::y0ba: return "y0ba";
    case Method::ideal: return "ideal";
    case Method::csi: return "csi";
    case Method::y0csi: return "y0csi";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "ba") return Method::ba;
  if (name == "y0ba") return Method::y0ba;
  if (name == "ideal") return Method::ideal;
  if (name == "csi") return Method::csi;
  if (name == "y0csi") return Method::y0csi;
  throw std::invalid_argument("method.name: unknown method '" + name + "'");
}

namespace {

const std::map<std::string, std::set<std::string>> kKeys = {
    {"scene",
     {"side_length_wavelengths", "cells", "forward_refinement", "phantom", "data_file", "contrast",
      "contrast_imag", "radius_wavelengths", "center_x_wavelengths", "center_y_wavelengths",
      "separation_wavelengths", "inner_radius_wavelengths", "inner_contrast",
      "inner_contrast_imag"}},
    {"setup", {"frequency_hz", "antennas", "receivers", "radius_wavelengths"}},
    {"noise", {"snr_db", "seed"}},
    {"method",
     {"name", "threshold_rule", "threshold", "threshold_min", "threshold_max", "threshold_count",
      "discrepancy_tau", "noise_level", "max_iter", "tol", "tv", "passivity", "kernel_clamp", "kernel_slack"}},
    {"output", {"directory"}},
};

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

  std::string str(const std::string& key) const { return tree_.get<std::string>(key); }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    return parse<T>(key, str(key));
  }

  template <typename T>
  T require(const std::string& key) const {
    if (!has(key)) throw std::invalid_argument("missing required key '" + key + "'");
    return parse<T>(key, str(key));
  }

 private:
  template <typename T>
  static T parse(const std::string& key, const std::string& raw) {
    if constexpr (std::is_same_v<T, std::string>) {
      return raw;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (raw == "true" || raw == "on" || raw == "yes" || raw == "1") return true;
      if (raw == "false" || raw == "off" || raw == "no" || raw == "0") return false;
      throw std::invalid_argument("key '" + key + "': expected a boolean, got '" + raw + "'");
    } else {
      std::istringstream in(raw);
      T value{};
      std::string rest;
      if (!(in >> value) || (in >> rest)) {
        throw std::invalid_argument("key '" + key + "': cannot parse '" + raw + "'");
      }
      return value;
    }
  }

  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("key '" + section + "' outside any section");
    }
    const auto it = kKeys.find(section);
    if (it == kKeys.end()) {
      throw std::invalid_argument("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw std::invalid_argument("unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

ThresholdRule rule_from_string(const std::string& name) {
  if (name == "fixed") return ThresholdRule::fixed;
  if (name == "discrepancy") return ThresholdRule::discrepancy;
  if (name == "oracle") return ThresholdRule::oracle;
  throw std::invalid_argument("method.threshold_rule: unknown rule '" + name + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument("line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_keys(tree);
  const Reader r(tree);
  Scenario s;
  s.name = name;

  s.scene.side_wavelengths = r.get("scene.side_length_wavelengths", 1.0);
  s.scene.cells = r.require<int>("scene.cells");
  s.scene.forward_refinement = r.get("scene.forward_refinement", 2);
  const bool has_phantom = r.has("scene.phantom");
  const bool has_file = r.has("scene.data_file");
  if (has_phantom == has_file) {
    throw std::invalid_argument("[scene] needs exactly one of 'phantom' and 'data_file'");
  }
  if (has_phantom) s.scene.phantom = phantom_kind_from_string(r.str("scene.phantom"));
  if (has_file) s.scene.data_file = r.str("scene.data_file");
  s.scene.contrast = cplx(r.get("scene.contrast", 0.0), r.get("scene.contrast_imag", 0.0));
  s.scene.radius_wavelengths = r.get("scene.radius_wavelengths", 0.25);
  s.scene.center_x_wavelengths = r.get("scene.center_x_wavelengths", 0.0);
  s.scene.center_y_wavelengths = r.get("scene.center_y_wavelengths", 0.0);
  s.scene.separation_wavelengths = r.get("scene.separation_wavelengths", 0.0);
  s.scene.inner_radius_wavelengths = r.get("scene.inner_radius_wavelengths", 0.0);
  s.scene.inner_contrast =
      cplx(r.get("scene.inner_contrast", 0.0), r.get("scene.inner_contrast_imag", 0.0));
  if (s.scene.cells < 2) throw std::invalid_argument("scene.cells must be at least 2");
  if (s.scene.forward_refinement < 1) {
    throw std::invalid_argument("scene.forward_refinement must be at least 1");
  }
  if (!(s.scene.side_wavelengths > 0.0)) {
    throw std::invalid_argument("scene.side_length_wavelengths must be positive");
  }

  s.setup.frequency_hz = r.require<double>("setup.frequency_hz");
  if (!(s.setup.frequency_hz > 0.0)) throw std::invalid_argument("setup.frequency_hz must be positive");
  if (has_phantom) {
    s.setup.transmitters = r.require<int>("setup.antennas");
    s.setup.receivers = r.get("setup.receivers", s.setup.transmitters);
    s.setup.radius_wavelengths = r.require<double>("setup.radius_wavelengths");
    if (s.setup.transmitters < 1 || s.setup.receivers < 1) {
      throw std::invalid_argument("setup.antennas and setup.receivers must be positive");
    }
  } else {
    for (const char* key : {"setup.antennas", "setup.receivers", "setup.radius_wavelengths"}) {
      if (r.has(key)) {
        throw std::invalid_argument(std::string("'") + key +
                                    "' conflicts with scene.data_file (geometry comes from the file)");
      }
    }
  }

  if (r.has("noise.snr_db")) {
    const std::string raw = r.str("noise.snr_db");
    s.noise.snr_db = (raw == "inf" || raw == "none") ? kNoiseless : r.get("noise.snr_db", 0.0);
  }
  s.noise.seed = r.get<std::uint64_t>("noise.seed", 1);
  if (has_file && r.has("noise.snr_db")) {
    throw std::invalid_argument("noise.snr_db conflicts with scene.data_file (measured data)");
  }

  s.method.name = method_from_string(r.require<std::string>("method.name"));
  if (s.method.name == Method::ideal && has_file) {
    throw std::invalid_argument("method 'ideal' needs the true total field and so a phantom");
  }
  const std::string default_rule = has_phantom ? "oracle" : "fixed";
  s.method.threshold.rule = rule_from_string(r.get<std::string>("method.threshold_rule", default_rule));
  if (s.method.threshold.rule == ThresholdRule::oracle && has_file) {
    throw std::invalid_argument("threshold_rule 'oracle' needs a phantom");
  }
  s.method.threshold.fixed = r.get("method.threshold", s.method.threshold.fixed);
  s.method.threshold.min = r.get("method.threshold_min", s.method.threshold.min);
  s.method.threshold.max = r.get("method.threshold_max", s.method.threshold.max);
  s.method.threshold.count = r.get("method.threshold_count", s.method.threshold.count);
  s.method.threshold.tau = r.get("method.discrepancy_tau", s.method.threshold.tau);
  s.method.threshold.noise_level = r.get("method.noise_level", 0.0);
  if (s.method.threshold.rule == ThresholdRule::discrepancy && has_file &&
      !(s.method.threshold.noise_level > 0.0)) {
    throw std::invalid_argument("threshold_rule 'discrepancy' on measured data needs method.noise_level");
  }
  s.method.max_iterations = r.get("method.max_iter", s.method.max_iterations);
  s.method.tolerance = r.get("method.tol", s.method.tolerance);
  s.method.total_variation = r.get("method.tv", has_file);
  s.method.passivity = r.get("method.passivity", false);
  s.method.kernel.clamp_to_sampling = r.get("method.kernel_clamp", s.method.kernel.clamp_to_sampling);
  s.method.kernel.n_slack = r.get("method.kernel_slack", s.method.kernel.n_slack);
  if (s.method.max_iterations < 0) throw std::invalid_argument("method.max_iter must be >= 0");
  const ThresholdOptions& t = s.method.threshold;
  if (!(t.min > 0.0 && t.min <= t.max && t.max <= 1.0) || t.count < 1) {
    throw std::invalid_argument("threshold sweep needs 0 < threshold_min <= threshold_max <= 1");
  }

  s.output_directory = r.get<std::string>("output.directory", "out/" + name);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), std::filesystem::path(path).stem().string());
  if (!s.scene.data_file.empty() && std::filesystem::path(s.scene.data_file).is_relative()) {
    s.scene.data_file =
        (std::filesystem::path(path).parent_path() / s.scene.data_file).lexically_normal().string();
  }
  return s;
}

Phantom make_phantom(const Scenario& s, double wavelength) {
  if (!s.scene.phantom) throw std::invalid_argument("scenario has no phantom");
  const double side = s.scene.side_wavelengths * wavelength;
  const Point c{s.scene.center_x_wavelengths * wavelength, s.scene.center_y_wavelengths * wavelength};
  const double radius = s.scene.radius_wavelengths * wavelength;
  switch (*s.scene.phantom) {
    case PhantomKind::kite: return make_kite(side, s.scene.contrast);
    case PhantomKind::austria: return make_austria(side, s.scene.contrast);
    case PhantomKind::circle: return make_circle(c, radius, s.scene.contrast);
    case PhantomKind::two_circles: {
      const double half = 0.5 * s.scene.separation_wavelengths * wavelength;
      return make_two_circles({c.x - half, c.y}, {c.x + half, c.y}, radius, s.scene.contrast);
    }
    case PhantomKind::nested_circles:
      return make_nested_circles(c, radius, s.scene.contrast, c,
                                 s.scene.inner_radius_wavelengths * wavelength,
                                 s.scene.inner_contrast);
  }
  throw std::invalid_argument("unsupported phantom");
}

}  // namespace y0scat
