#include "y0scat/fresnel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace y0scat {

namespace {

struct Row {
  double tx, rx, ghz;
  cplx et, ei;
};

long angle_key(double deg) { return std::lround(std::remainder(deg, 360.0) * 1000.0); }
long freq_key(double hz) { return std::lround(hz / 1e3); }

double to_rad(long key) { return key / 1000.0 * kPi / 180.0; }

struct Parsed {
  double tx_radius = 0.0;
  double rx_radius = 0.0;
  std::vector<Row> rows;
};

Parsed read_rows(std::istream& in, const std::string& source) {
  Parsed p;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      double value;
      if (hs >> key && (key == "tx_radius" || key == "rx_radius")) {
        if (!(hs >> value) || !(value > 0.0)) {
          throw std::runtime_error(source + ":" + std::to_string(line_no) + ": bad " + key);
        }
        (key == "tx_radius" ? p.tx_radius : p.rx_radius) = value;
      }
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (v.size() == 5) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) +
                               ": missing incident-field columns");
    }
    if (v.size() != 7) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": expected 7 columns, got " +
                               std::to_string(v.size()));
    }
    p.rows.push_back({v[0], v[1], v[2], cplx(v[3], v[4]), cplx(v[5], v[6])});
  }
  if (!(p.tx_radius > 0.0) || !(p.rx_radius > 0.0)) {
    throw std::runtime_error(source + ": missing '# tx_radius' or '# rx_radius' header");
  }
  return p;
}

}  // namespace

FresnelDataset parse_fresnel_text(const std::string& text, double frequency_hz,
                                  const std::string& source) {
  std::istringstream in(text);
  const Parsed p = read_rows(in, source);
  const long want = freq_key(frequency_hz);
  std::set<long> tx, rx;
  for (const Row& r : p.rows) {
    if (freq_key(r.ghz * 1e9) != want) continue;
    tx.insert(angle_key(r.tx));
    rx.insert(angle_key(r.rx));
  }
  if (tx.empty()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", frequency_hz / 1e9);
    throw std::runtime_error(source + ": no measurements at " + buf + " GHz");
  }
  std::map<long, int> tx_index, rx_index;
  FresnelDataset d;
  d.frequency = frequency_hz;
  d.tx_radius = p.tx_radius;
  d.rx_radius = p.rx_radius;
  for (long k : tx) {
    tx_index[k] = d.views();
    d.tx_angles.push_back(to_rad(k));
  }
  for (long k : rx) {
    rx_index[k] = d.receivers();
    d.rx_angles.push_back(to_rad(k));
  }
  const int m = d.receivers(), v = d.views();
  d.total = CMatrix::Zero(m, v);
  d.incident = CMatrix::Zero(m, v);
  d.scattered = CMatrix::Zero(m, v);
  d.present = DataMask::Constant(m, v, false);
  for (const Row& r : p.rows) {
    if (freq_key(r.ghz * 1e9) != want) continue;
    const int i = rx_index[angle_key(r.rx)];
    const int j = tx_index[angle_key(r.tx)];
    d.total(i, j) = r.et;
    d.incident(i, j) = r.ei;
    d.scattered(i, j) = r.et - r.ei;
    d.present(i, j) = true;
  }
  d.limited_aspect = !d.present.all();
  return d;
}

FresnelDataset parse_fresnel(const std::string& path, double frequency_hz) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_fresnel_text(buf.str(), frequency_hz, path);
}

std::vector<double> fresnel_frequencies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const Parsed p = read_rows(in, path);
  std::set<long> keys;
  for (const Row& r : p.rows) keys.insert(freq_key(r.ghz * 1e9));
  std::vector<double> out;
  for (long k : keys) out.push_back(k * 1e3);
  return out;
}

void write_fresnel(const FresnelDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  char buf[256];
  std::snprintf(buf, sizeof buf, "# tx_radius %.17g\n# rx_radius %.17g\n", d.tx_radius, d.rx_radius);
  out << buf << "# tx_deg rx_deg freq_GHz re_Et im_Et re_Ei im_Ei\n";
  for (int j = 0; j < d.views(); ++j) {
    for (int i = 0; i < d.receivers(); ++i) {
      if (d.present.size() && !d.present(i, j)) continue;
      std::snprintf(buf, sizeof buf, "%.6f %.6f %.9g %.17g %.17g %.17g %.17g\n",
                    d.tx_angles[j] * 180.0 / kPi, d.rx_angles[i] * 180.0 / kPi, d.frequency / 1e9,
                    d.total(i, j).real(), d.total(i, j).imag(), d.incident(i, j).real(),
                    d.incident(i, j).imag());
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

MeasurementSetup fresnel_setup(const FresnelDataset& d, double domain_side) {
  return make_setup_from_angles(d.frequency, d.tx_radius, d.tx_angles, d.rx_radius, d.rx_angles,
                                domain_side);
}

Calibration calibrate(const FresnelDataset& d, const MeasurementSetup& setup) {
  const CMatrix simulated = incident_at(setup.receivers, setup);
  Calibration c;
  cplx sum = 0.0;
  for (int j = 0; j < d.views(); ++j) {
    int best = -1;
    double best_gap = 1e300;
    for (int i = 0; i < d.receivers(); ++i) {
      if (!d.present(i, j) || std::abs(d.incident(i, j)) == 0.0) continue;
      const double gap = std::abs(std::remainder(d.rx_angles[i] - d.tx_angles[j], 2.0 * kPi));
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < 0) continue;
    sum += simulated(best, j) / d.incident(best, j);
    ++c.samples;
  }
  if (c.samples == 0) throw std::runtime_error("calibration: no usable incident-field samples");
  c.factor = sum / static_cast<double>(c.samples);
  return c;
}

CMatrix calibrated_scattered(const FresnelDataset& d, const Calibration& calibration) {
  CMatrix out = d.scattered * calibration.factor;
  for (int j = 0; j < d.views(); ++j) {
    for (int i = 0; i < d.receivers(); ++i) {
      if (!d.present(i, j)) out(i, j) = 0.0;
    }
  }
  return out;
}

}  // namespace y0scat
