#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <random>

#include "doctest.h"
#include "y0scat/operators.hpp"
#include "y0scat/specfun.hpp"

using namespace y0scat;

namespace {

CVector random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

// -(j k^2 / 4) int_disc H0(k |r - c|) dA by 2D Gauss quadrature, rho > a.
cplx disc_integral(double k, double a, double rho) {
  using boost::math::quadrature::gauss;
  auto inner = [&](double s) {
    return gauss<double, 40>::integrate(
               [&](double t) {
                 const double d = std::sqrt(rho * rho + s * s - 2 * rho * s * std::cos(t));
                 return hankel2(0, k * d);
               },
               0.0, 2 * kPi) *
           s;
  };
  const cplx i = gauss<double, 40>::integrate(inner, 0.0, a);
  return -0.25 * kJ * k * k * i;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("Green's function") {
    const double k = 2 * kPi;
    const cplx g = greens({0.3, 0.0}, {0.0, 0.4}, k);
    CHECK(std::abs(g - (-0.25 * kJ * k * k * hankel2(0, k * 0.5))) < 1e-14);
    CHECK_THROWS(greens({1, 1}, {1, 1}, k));
  }

  TEST_CASE("self term against quadrature") {
    using boost::math::quadrature::tanh_sinh;
    const double k = 2 * kPi;
    for (double a : {0.005, 0.02, 0.08}) {
      tanh_sinh<double> ts;
      const double re = ts.integrate([&](double r) { return bessel_j(0, k * r) * r; }, 0.0, a);
      const double im = ts.integrate([&](double r) { return -bessel_y(0, k * r) * r; }, 0.0, a);
      const cplx expected = -0.25 * kJ * k * k * 2.0 * kPi * cplx(re, im);
      CHECK(std::abs(cell_greens_self(k, a) - expected) < 1e-10 * std::abs(expected));
    }
  }

  TEST_CASE("off-diagonal and J0 terms against quadrature") {
    const double k = 2 * kPi, a = 0.03;
    for (double rho : {0.07, 0.2, 1.3}) {
      const cplx q = disc_integral(k, a, rho);
      CHECK(std::abs(cell_greens(k, a, rho) - q) < 1e-10 * std::abs(q));
    }
    // the J0 part is the imaginary part of the full disc integral
    for (double rho : {0.07, 0.2, 1.3}) {
      CHECK(std::abs(cell_greens_j0(k, a, rho) - cplx(0.0, cell_greens(k, a, rho).imag())) < 1e-12);
    }
    CHECK(std::abs(cell_greens_j0(k, a, 0.0) - cplx(0.0, (cell_greens_self(k, a) + 1.0).imag())) <
          1e-12);
  }

  TEST_CASE("convolution matches dense product and adjoint") {
    const Grid g(1.0, 7);
    const GridConvolution ai = internal_operator(g, 2 * kPi);
    const CMatrix dense = ai.dense();
    const CVector x = random_vector(49, 1), y = random_vector(49, 2);
    CHECK((ai.apply(x) - dense * x).norm() < 1e-12 * (dense * x).norm());
    CHECK(std::abs(ai.apply(x).dot(y) - x.dot(ai.apply_adjoint(y))) < 1e-12 * x.norm() * y.norm());
    CHECK((dense - dense.transpose()).norm() < 1e-14 * dense.norm());
  }

  TEST_CASE("decomposition identity") {
    const double lambda = 1.0, k = 2 * kPi / lambda;
    const Grid g(lambda, 30);
    const auto setup = make_setup(299792458.0, 10.0, 4, 4, lambda);
    const DiscreteOperators ops = assemble(g, setup);
    const DenseInternal d = assemble_dense(ops);
    const CMatrix diff = d.Ai - d.AiJ0 - d.AiY0;
    const double rel = (diff.cwiseAbs().array() / d.Ai.cwiseAbs().array()).maxCoeff();
    CHECK(rel < 1e-12);
    CHECK(ops.k == doctest::Approx(k).epsilon(1e-12));
    // J0 kernel is smooth: its diagonal is finite and small compared with Ai's
    CHECK(std::abs(d.AiJ0(0, 0)) < std::abs(d.Ai(0, 0)));
  }

  TEST_CASE("external operator") {
    const Grid g(1.0, 4);
    const std::vector<Point> rx{{5.0, 0.0}, {0.0, -5.0}};
    const double k = 2 * kPi;
    const CMatrix ae = external_operator(g, rx, k);
    REQUIRE(ae.rows() == 2);
    REQUIRE(ae.cols() == 16);
    CHECK(std::abs(ae(1, 5) - cell_greens(k, g.equivalent_radius(), distance(rx[1], g.center(5)))) <
          1e-15);
  }

  TEST_CASE("operator norm against SVD") {
    std::mt19937 rng(3);
    std::normal_distribution<double> n;
    CMatrix a(12, 9);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 9; ++j) a(i, j) = cplx(n(rng), n(rng));
    const double expected = Eigen::JacobiSVD<CMatrix>(a).singularValues()[0];
    CHECK(operator_norm(a) == doctest::Approx(expected).epsilon(1e-8));
    CHECK(operator_norm(CMatrix(CMatrix::Zero(3, 3))) == 0.0);
    const Grid g(0.5, 6);
    const GridConvolution ai = internal_operator(g, 2 * kPi);
    const double svd = Eigen::JacobiSVD<CMatrix>(ai.dense()).singularValues()[0];
    CHECK(operator_norm(as_linear_map(ai)) == doctest::Approx(svd).epsilon(1e-8));
  }

  TEST_CASE("norm sweep") {
    const NormSweep s = norm_sweep({0.1, 0.3, 0.5}, 10);
    REQUIRE(s.norm_ai.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(s.norm_aiy0[i] < s.norm_ai[i]);
    CHECK(s.norm_ai[0] < s.norm_ai[1]);
    CHECK(s.norm_ai[1] < s.norm_ai[2]);
    CHECK(s.norm_aiy0[0] < s.norm_aiy0[1]);
    CHECK(s.norm_aiy0[1] < s.norm_aiy0[2]);
  }

  TEST_CASE("Neumann series") {
    const Grid g(0.3, 6);
    const GridConvolution ai = internal_operator(g, 2 * kPi);
    const CVector chi = CVector::Constant(36, 0.1);
    const CVector ei = random_vector(36, 4);
    CHECK((neumann_series_apply(ai, chi, ei, 0) - ei).norm() == 0.0);
    const CVector one = ei + ai.apply(CVector(chi.cwiseProduct(ei)));
    CHECK((neumann_series_apply(ai, chi, ei, 1) - one).norm() < 1e-12 * one.norm());
  }
}
