#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "y0scat/scene.hpp"
#include "y0scat/specfun.hpp"

using namespace y0scat;

namespace {

struct Ref {
  int n;
  double x, j, y;
};

std::vector<Ref> load_table() {
  std::ifstream in(std::string(Y0SCAT_TEST_DATA) + "/bessel_reference.csv");
  REQUIRE(in.good());
  std::vector<Ref> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Ref r;
    ls >> r.n >> r.x >> r.j >> r.y;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_SUITE("specfun") {
  TEST_CASE("reference table") {
    const auto rows = load_table();
    REQUIRE(rows.size() > 800);
    double worst = 0.0;
    for (const Ref& r : rows) {
      // oscillatory region: compare against the modulus |H_n|
      const double envelope = std::hypot(r.j, r.y);
      const double scale_j = r.x > r.n ? envelope : std::abs(r.j);
      const double scale_y = r.x > r.n ? envelope : std::abs(r.y);
      const double ej = std::abs(bessel_j(r.n, r.x) - r.j) / scale_j;
      const double ey = std::abs(bessel_y(r.n, r.x) - r.y) / scale_y;
      worst = std::max({worst, ej, ey});
      INFO("n=" << r.n << " x=" << r.x);
      REQUIRE(ej < 1e-10);
      REQUIRE(ey < 1e-10);
    }
    MESSAGE("worst relative error " << worst);
  }

  TEST_CASE("Wronskian") {
    for (int n = 0; n <= 60; ++n) {
      for (double x : {1e-3, 0.01, 0.5, 1.0, 7.3, 42.0, 150.0, 500.0}) {
        const double w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x);
        INFO("n=" << n << " x=" << x);
        REQUIRE(w == doctest::Approx(2.0 / (kPi * x)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("spec examples") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-15);
    CHECK(bessel_y(0, 1.0) == doctest::Approx(0.08825696421567696).epsilon(1e-14));
    CHECK_THROWS_AS(bessel_y(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_y(2, -1.0), std::domain_error);
    const std::complex<double> h = hankel2(1, 3.0);
    CHECK(h.real() == doctest::Approx(bessel_j(1, 3.0)));
    CHECK(h.imag() == doctest::Approx(-bessel_y(1, 3.0)));
  }

  TEST_CASE("negative orders") {
    for (int n = 1; n < 8; ++n) {
      const double s = n % 2 ? -1.0 : 1.0;
      CHECK(bessel_j(-n, 2.5) == doctest::Approx(s * bessel_j(n, 2.5)));
      CHECK(bessel_y(-n, 2.5) == doctest::Approx(s * bessel_y(n, 2.5)));
    }
  }

  TEST_CASE("Y overflows to -inf") {
    const double y = bessel_y(200, 1e-3);
    CHECK(std::isinf(y));
    CHECK(y < 0.0);
  }

  TEST_CASE("integral representation oracle") {
    // J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt
    using boost::math::quadrature::gauss_kronrod;
    for (int n : {0, 1, 4, 9}) {
      for (double x : {0.3, 2.0, 11.0}) {
        const double q = gauss_kronrod<double, 61>::integrate(
                             [&](double t) { return std::cos(n * t - x * std::sin(t)); }, 0.0, kPi,
                             15, 1e-14) /
                         kPi;
        CHECK(bessel_j(n, x) == doctest::Approx(q).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("recurrence") {
    for (int n = 1; n < 40; ++n) {
      const double x = 17.5;
      CHECK(bessel_y(n - 1, x) + bessel_y(n + 1, x) ==
            doctest::Approx(2.0 * n / x * bessel_y(n, x)).epsilon(1e-10).scale(1.0));
    }
  }
}
