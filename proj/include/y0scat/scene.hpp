#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace y0scat {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kJ{0.0, 1.0};
inline constexpr double kEps0 = 8.8541878128e-12;
inline constexpr double kMu0 = 1.25663706212e-6;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);
double norm(Point a);
double angle(Point a);

// Square investigation domain [-L/2, L/2]^2 split into n x n pulse cells.
// Cell p = row * n + col; row runs along y, col along x, both ascending.
class Grid {
 public:
  Grid(double side_length, int cells_per_side);

  double side_length() const { return side_; }
  int n() const { return n_; }
  int cell_count() const { return n_ * n_; }
  double cell_size() const { return side_ / n_; }
  double cell_area() const { return cell_size() * cell_size(); }
  // Radius of the disc with the same area as one cell.
  double equivalent_radius() const;

  Point center(int p) const { return center(p / n_, p % n_); }
  Point center(int row, int col) const;

  bool operator==(const Grid& other) const = default;

 private:
  double side_;
  int n_;
};

// Antenna rings around the domain. Transmitters and receivers may sit on
// different radii (experimental set-ups) but each ring is a circle
// centred on the origin.
struct MeasurementSetup {
  double frequency = 0.0;
  double eps_b = kEps0;
  double mu_b = kMu0;
  double wavenumber = 0.0;
  double wavelength = 0.0;
  double tx_radius = 0.0;
  double rx_radius = 0.0;
  double enclosing_radius = 0.0;
  std::vector<Point> transmitters;
  std::vector<Point> receivers;
  // False when receivers are not equiangular over the full circle.
  bool uniform_receivers = true;

  int views() const { return static_cast<int>(transmitters.size()); }
  int receiver_count() const { return static_cast<int>(receivers.size()); }
};

double wavenumber(double frequency, double eps_b = kEps0, double mu_b = kMu0);
double wavelength(double frequency, double eps_b = kEps0, double mu_b = kMu0);

// Equiangular rings of `views` transmitters and `receivers` receivers on a
// circle of radius `radius` around a domain of side `domain_side`.
MeasurementSetup make_setup(double frequency, double radius, int views, int receivers,
                            double domain_side, double eps_b = kEps0, double mu_b = kMu0);

// Arbitrary angular positions (radians). Used for limited-aspect data.
MeasurementSetup make_setup_from_angles(double frequency, double tx_radius,
                                        const std::vector<double>& tx_angles,
                                        double rx_radius,
                                        const std::vector<double>& rx_angles,
                                        double domain_side);

struct ContrastMap {
  int n = 0;
  CVector values;

  ContrastMap() = default;
  explicit ContrastMap(const Grid& grid) : n(grid.n()), values(CVector::Zero(grid.cell_count())) {}
  ContrastMap(int cells_per_side, CVector v) : n(cells_per_side), values(std::move(v)) {}

  int support_size(double tol = 0.0) const;
};

enum class PhantomKind { kite, austria, circle, two_circles, nested_circles };

std::string to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(const std::string& name);

// A phantom is an ordered list of primitive shapes; later shapes overwrite
// earlier ones where they overlap.
struct Shape {
  enum class Type { disc, annulus, polygon };
  Type type = Type::disc;
  Point center;
  double outer_radius = 0.0;
  double inner_radius = 0.0;
  std::vector<Point> vertices;
  cplx contrast{0.0, 0.0};

  bool contains(Point p) const;
  // Largest |x| or |y| reached by the shape.
  double extent() const;
};

struct Phantom {
  PhantomKind kind = PhantomKind::circle;
  std::vector<Shape> shapes;

  // Analytic area of the union (shapes are assumed disjoint or nested).
  double area() const;
};

Phantom make_kite(double domain_side, cplx contrast);
Phantom make_austria(double domain_side, cplx contrast);
Phantom make_circle(Point center, double radius, cplx contrast);
Phantom make_two_circles(Point c1, Point c2, double radius, cplx contrast);
Phantom make_nested_circles(Point center, double outer_radius, cplx outer_contrast,
                            Point inner_center, double inner_radius, cplx inner_contrast);

// Cell-centre membership. Throws std::invalid_argument if any shape reaches
// the domain boundary.
ContrastMap rasterize(const Phantom& phantom, const Grid& grid);

}  // namespace y0scat
