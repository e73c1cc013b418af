#include "y0scat/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace y0scat {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }
double norm(Point a) { return std::hypot(a.x, a.y); }
double angle(Point a) { return std::atan2(a.y, a.x); }

Grid::Grid(double side_length, int cells_per_side) : side_(side_length), n_(cells_per_side) {
  if (!(side_length > 0.0) || !std::isfinite(side_length)) {
    throw std::invalid_argument("Grid: side length must be positive");
  }
  if (cells_per_side < 2) {
    throw std::invalid_argument("Grid: need at least 2 cells per side");
  }
}

double Grid::equivalent_radius() const { return cell_size() / std::sqrt(kPi); }

Point Grid::center(int row, int col) const {
  const double d = cell_size();
  return {-0.5 * side_ + (col + 0.5) * d, -0.5 * side_ + (row + 0.5) * d};
}

double wavenumber(double frequency, double eps_b, double mu_b) {
  return 2.0 * kPi * frequency * std::sqrt(mu_b * eps_b);
}

double wavelength(double frequency, double eps_b, double mu_b) {
  return 2.0 * kPi / wavenumber(frequency, eps_b, mu_b);
}

namespace {

void check_common(double frequency, double eps_b, double mu_b, double domain_side) {
  if (!(frequency > 0.0)) throw std::invalid_argument("setup: frequency must be positive");
  if (!(eps_b > 0.0) || !(mu_b > 0.0)) {
    throw std::invalid_argument("setup: background must be lossless with positive eps, mu");
  }
  if (!(domain_side > 0.0)) throw std::invalid_argument("setup: domain side must be positive");
}

std::vector<Point> ring(double radius, const std::vector<double>& angles) {
  std::vector<Point> pts;
  pts.reserve(angles.size());
  for (double a : angles) pts.push_back({radius * std::cos(a), radius * std::sin(a)});
  return pts;
}

std::vector<double> equiangular(int count) {
  std::vector<double> a(count);
  for (int i = 0; i < count; ++i) a[i] = 2.0 * kPi * i / count;
  return a;
}

bool is_equiangular(std::vector<double> angles) {
  if (angles.size() < 2) return angles.size() == 1;
  for (double& a : angles) a = std::remainder(a, 2.0 * kPi);
  std::sort(angles.begin(), angles.end());
  const double step = 2.0 * kPi / angles.size();
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double next = (i + 1 < angles.size()) ? angles[i + 1] : angles[0] + 2.0 * kPi;
    if (std::abs(next - angles[i] - step) > 1e-9) return false;
  }
  return true;
}

MeasurementSetup finish(double frequency, double eps_b, double mu_b, double tx_radius,
                        const std::vector<double>& tx_angles, double rx_radius,
                        const std::vector<double>& rx_angles, double domain_side) {
  check_common(frequency, eps_b, mu_b, domain_side);
  const double enclosing = domain_side / std::sqrt(2.0);
  if (!(tx_radius > enclosing) || !(rx_radius > enclosing)) {
    throw std::invalid_argument("setup: antenna ring must lie outside the domain (R > L/sqrt(2))");
  }
  if (tx_angles.empty() || rx_angles.empty()) {
    throw std::invalid_argument("setup: need at least one transmitter and one receiver");
  }
  MeasurementSetup s;
  s.frequency = frequency;
  s.eps_b = eps_b;
  s.mu_b = mu_b;
  s.wavenumber = wavenumber(frequency, eps_b, mu_b);
  s.wavelength = 2.0 * kPi / s.wavenumber;
  s.tx_radius = tx_radius;
  s.rx_radius = rx_radius;
  s.enclosing_radius = enclosing;
  s.transmitters = ring(tx_radius, tx_angles);
  s.receivers = ring(rx_radius, rx_angles);
  s.uniform_receivers = is_equiangular(rx_angles);
  return s;
}

}  // namespace

MeasurementSetup make_setup(double frequency, double radius, int views, int receivers,
                            double domain_side, double eps_b, double mu_b) {
  if (views < 1 || receivers < 1) {
    throw std::invalid_argument("setup: need at least one transmitter and one receiver");
  }
  return finish(frequency, eps_b, mu_b, radius, equiangular(views), radius,
                equiangular(receivers), domain_side);
}

MeasurementSetup make_setup_from_angles(double frequency, double tx_radius,
                                        const std::vector<double>& tx_angles, double rx_radius,
                                        const std::vector<double>& rx_angles,
                                        double domain_side) {
  return finish(frequency, kEps0, kMu0, tx_radius, tx_angles, rx_radius, rx_angles,
                domain_side);
}

int ContrastMap::support_size(double tol) const {
  int count = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) > tol) ++count;
  }
  return count;
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::kite: return "kite";
    case PhantomKind::austria: return "austria";
    case PhantomKind::circle: return "circle";
    case PhantomKind::two_circles: return "two_circles";
    case PhantomKind::nested_circles: return "nested_circles";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(const std::string& name) {
  if (name == "kite") return PhantomKind::kite;
  if (name == "austria") return PhantomKind::austria;
  if (name == "circle") return PhantomKind::circle;
  if (name == "two_circles") return PhantomKind::two_circles;
  if (name == "nested_circles") return PhantomKind::nested_circles;
  throw std::invalid_argument("unknown phantom kind '" + name + "'");
}

bool Shape::contains(Point p) const {
  switch (type) {
    case Type::disc:
      return distance(p, center) < outer_radius;
    case Type::annulus: {
      const double r = distance(p, center);
      return r < outer_radius && r >= inner_radius;
    }
    case Type::polygon: {
      // even-odd crossing test
      bool inside = false;
      const std::size_t nv = vertices.size();
      for (std::size_t i = 0, j = nv - 1; i < nv; j = i++) {
        const Point a = vertices[i];
        const Point b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
          const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
          if (p.x < xc) inside = !inside;
        }
      }
      return inside;
    }
  }
  return false;
}

double Shape::extent() const {
  if (type == Type::polygon) {
    double e = 0.0;
    for (const Point& v : vertices) e = std::max({e, std::abs(v.x), std::abs(v.y)});
    return e;
  }
  return std::max(std::abs(center.x), std::abs(center.y)) + outer_radius;
}

double Phantom::area() const {
  double total = 0.0;
  for (const Shape& s : shapes) {
    switch (s.type) {
      case Shape::Type::disc: total += kPi * s.outer_radius * s.outer_radius; break;
      case Shape::Type::annulus:
        total += kPi * (s.outer_radius * s.outer_radius - s.inner_radius * s.inner_radius);
        break;
      case Shape::Type::polygon: {
        double a = 0.0;
        const std::size_t nv = s.vertices.size();
        for (std::size_t i = 0, j = nv - 1; i < nv; j = i++) {
          a += s.vertices[j].x * s.vertices[i].y - s.vertices[i].x * s.vertices[j].y;
        }
        total += 0.5 * std::abs(a);
        break;
      }
    }
  }
  // nested shapes overwrite rather than add
  if (kind == PhantomKind::nested_circles && shapes.size() == 2) {
    total -= kPi * shapes[1].outer_radius * shapes[1].outer_radius;
  }
  return total;
}

Phantom make_kite(double domain_side, cplx contrast) {
  // x(t) = cos t + 0.65 cos 2t - 0.65, y(t) = 1.5 sin t spans
  // [-1.4923, 1] x [-1.5, 1.5]; scale the 3-unit height to 0.8 L.
  constexpr int kVertices = 1024;
  const double s = 0.8 * domain_side / 3.0;
  double lo = 1e300, hi = -1e300;
  std::vector<Point> raw(kVertices);
  for (int i = 0; i < kVertices; ++i) {
    const double t = 2.0 * kPi * i / kVertices;
    raw[i] = {std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65, 1.5 * std::sin(t)};
    lo = std::min(lo, raw[i].x);
    hi = std::max(hi, raw[i].x);
  }
  const double shift = -0.5 * (lo + hi);
  Shape kite;
  kite.type = Shape::Type::polygon;
  kite.contrast = contrast;
  kite.vertices.reserve(kVertices);
  for (const Point& p : raw) kite.vertices.push_back({s * (p.x + shift), s * p.y});
  return Phantom{PhantomKind::kite, {kite}};
}

Phantom make_austria(double domain_side, cplx contrast) {
  const double h = 0.5 * domain_side;
  Shape left{Shape::Type::disc, {-0.3 * h, 0.6 * h}, 0.2 * h, 0.0, {}, contrast};
  Shape right{Shape::Type::disc, {0.3 * h, 0.6 * h}, 0.2 * h, 0.0, {}, contrast};
  Shape ring{Shape::Type::annulus, {0.0, -0.2 * h}, 0.6 * h, 0.3 * h, {}, contrast};
  return Phantom{PhantomKind::austria, {left, right, ring}};
}

Phantom make_circle(Point center, double radius, cplx contrast) {
  if (radius < 0.0) throw std::invalid_argument("circle: negative radius");
  return Phantom{PhantomKind::circle, {Shape{Shape::Type::disc, center, radius, 0.0, {}, contrast}}};
}

Phantom make_two_circles(Point c1, Point c2, double radius, cplx contrast) {
  if (radius < 0.0) throw std::invalid_argument("two_circles: negative radius");
  return Phantom{PhantomKind::two_circles,
                 {Shape{Shape::Type::disc, c1, radius, 0.0, {}, contrast},
                  Shape{Shape::Type::disc, c2, radius, 0.0, {}, contrast}}};
}

Phantom make_nested_circles(Point center, double outer_radius, cplx outer_contrast,
                            Point inner_center, double inner_radius, cplx inner_contrast) {
  if (inner_radius < 0.0 || outer_radius < 0.0) {
    throw std::invalid_argument("nested_circles: negative radius");
  }
  if (distance(center, inner_center) + inner_radius > outer_radius) {
    throw std::invalid_argument("nested_circles: inner cylinder must lie inside the outer one");
  }
  return Phantom{PhantomKind::nested_circles,
                 {Shape{Shape::Type::disc, center, outer_radius, 0.0, {}, outer_contrast},
                  Shape{Shape::Type::disc, inner_center, inner_radius, 0.0, {}, inner_contrast}}};
}

ContrastMap rasterize(const Phantom& phantom, const Grid& grid) {
  const double half = 0.5 * grid.side_length();
  for (const Shape& s : phantom.shapes) {
    if (s.extent() >= half) {
      throw std::invalid_argument("rasterize: phantom " + to_string(phantom.kind) +
                                  " exceeds the investigation domain");
    }
  }
  ContrastMap map(grid);
  for (int p = 0; p < grid.cell_count(); ++p) {
    const Point c = grid.center(p);
    for (const Shape& s : phantom.shapes) {
      if (s.contains(c)) map.values[p] = s.contrast;
    }
  }
  return map;
}

}  // namespace y0scat
