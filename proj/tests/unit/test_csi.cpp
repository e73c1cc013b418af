#include <boost/math/tools/minima.hpp>
#include <random>

#include "doctest.h"
#include "y0scat/csi.hpp"

using namespace y0scat;

namespace {

const double kFreq = 299792458.0;

CMatrix random_matrix(int rows, int cols, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * cplx(g(rng), g(rng));
  return m;
}

struct Small {
  Grid grid{0.8, 5};
  MeasurementSetup setup = make_setup(kFreq, 3.0, 3, 8, 0.8);
  DiscreteOperators ops = assemble(grid, setup);
  ContrastMap chi = rasterize(make_circle({0.0, 0.0}, 0.3, cplx(0.6, -0.2)), grid);
  ForwardSolution sol = solve_forward(chi, ops, setup);
};

// Re <g, d> against the central difference of Phi along d.
double fd_gradient_error(const CsiProblem& pb, const CMatrix& w, const ContrastMap& chi, unsigned seed) {
  const CMatrix g = gradient_w(w, chi, pb);
  const CMatrix d = random_matrix(w.rows(), w.cols(), seed);
  const double h = 1e-4 * w.norm() / d.norm();
  const double fd =
      (csi_functional(w + h * d, chi, pb).phi - csi_functional(w - h * d, chi, pb).phi) / (2 * h);
  const double an = (g.adjoint() * d).trace().real();
  return std::abs(fd - an) / std::abs(an);
}

}  // namespace

TEST_SUITE("csi") {
  TEST_CASE("functional at zero") {
    const Small s;
    for (CsiModel m : {CsiModel::h02, CsiModel::y0}) {
      const CsiProblem pb = make_csi_problem(m, s.sol.scattered.values, s.ops, s.setup);
      const CsiTerms t = csi_functional(CMatrix::Zero(25, 3), ContrastMap(s.grid), pb);
      CHECK(t.data_term == doctest::Approx(3.0));
      CHECK(t.state_term == 0.0);
      CHECK(t.phi == doctest::Approx(3.0));
    }
  }

  TEST_CASE("functional at the exact solution") {
    const Small s;
    const CsiProblem h = make_csi_problem(CsiModel::h02, s.sol.scattered.values, s.ops, s.setup);
    CHECK(csi_functional(s.sol.currents.values, s.chi, h).phi < 1e-3);
    CHECK(gradient_w(s.sol.currents.values, s.chi, h).norm() < 1e-8);
    const CsiProblem y = make_csi_problem(CsiModel::y0, s.sol.scattered.values, s.ops, s.setup);
    CHECK(csi_functional(s.sol.currents.values, s.chi, y).phi < 5e-3);
  }

  TEST_CASE("gradient against finite differences") {
    const Small s;
    const CMatrix w = random_matrix(25, 3, 11, 1e-3);
    const ContrastMap chi(5, random_matrix(25, 1, 12, 0.5).col(0));
    for (CsiModel m : {CsiModel::h02, CsiModel::y0}) {
      const CsiProblem pb = make_csi_problem(m, s.sol.scattered.values, s.ops, s.setup);
      for (unsigned seed : {1u, 2u, 3u}) CHECK(fd_gradient_error(pb, w, chi, seed) < 1e-6);
    }
  }

  TEST_CASE("models differ only through the internal operator and incident field") {
    const Small s;
    CsiProblem h = make_csi_problem(CsiModel::h02, s.sol.scattered.values, s.ops, s.setup);
    const CsiProblem y = make_csi_problem(CsiModel::y0, s.sol.scattered.values, s.ops, s.setup);
    h.internal = y.internal;
    h.incident = y.incident;
    h.state_norm = y.state_norm;
    const CMatrix w = random_matrix(25, 3, 4, 1e-3);
    const ContrastMap chi(5, random_matrix(25, 1, 5).col(0));
    CHECK((gradient_w(w, chi, h) - gradient_w(w, chi, y)).norm() == 0.0);
  }

  TEST_CASE("back-propagation step length") {
    const Small s;
    const CMatrix& es = s.sol.scattered.values;
    const CMatrix w = backpropagation_init(es, s.ops.Ae);
    for (int v = 0; v < 3; ++v) {
      const CVector b = s.ops.Ae.adjoint() * es.col(v);
      auto misfit = [&](double a) { return (es.col(v) - a * (s.ops.Ae * b)).squaredNorm(); };
      const double alpha = w.col(v).norm() / b.norm();
      const auto best = boost::math::tools::brent_find_minima(misfit, 0.0, 10 * alpha, 50);
      CHECK(alpha == doctest::Approx(best.first).epsilon(1e-6));
      CHECK(misfit(alpha) <= es.col(v).squaredNorm());
    }
    CHECK(backpropagation_init(CMatrix::Zero(8, 3), s.ops.Ae).norm() == 0.0);
  }

  TEST_CASE("contrast update") {
    const Small s;
    const ContrastMap exact =
        update_chi(s.sol.currents.values, s.sol.total.values, {1.0, 2.0, 0.5}, 5);
    CHECK((exact.values - s.chi.values).norm() < 1e-10);

    const CMatrix w = random_matrix(25, 1, 7), e = random_matrix(25, 1, 8);
    const ContrastMap single = update_chi(w, e, {3.0}, 5);
    for (int p = 0; p < 25; ++p) CHECK(std::abs(single.values[p] - w(p, 0) / e(p, 0)) < 1e-12);

    // per-cell weighted least squares in real arithmetic
    const CMatrix w3 = random_matrix(25, 3, 9), e3 = random_matrix(25, 3, 10);
    const std::vector<double> wt{0.2, 1.0, 3.0};
    const ContrastMap multi = update_chi(w3, e3, wt, 5);
    for (int p = 0; p < 25; ++p) {
      Eigen::MatrixXd a(6, 2);
      Eigen::VectorXd b(6);
      for (int v = 0; v < 3; ++v) {
        const double sw = std::sqrt(wt[v]);
        a.row(2 * v) << sw * e3(p, v).real(), -sw * e3(p, v).imag();
        a.row(2 * v + 1) << sw * e3(p, v).imag(), sw * e3(p, v).real();
        b[2 * v] = sw * w3(p, v).real();
        b[2 * v + 1] = sw * w3(p, v).imag();
      }
      const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
      CHECK(std::abs(multi.values[p] - cplx(x[0], x[1])) < 1e-12);
    }

    CMatrix dead = e;
    dead(4, 0) = 0.0;
    int zeros = 0;
    const ContrastMap flagged = update_chi(w, dead, {1.0}, 5, &zeros);
    CHECK(zeros == 1);
    CHECK(flagged.values[4] == cplx(0.0));
  }

  TEST_CASE("total variation") {
    const Grid g(1.0, 4);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(16);
    CHECK(tv_penalty(ContrastMap(4, CVector::Constant(16, cplx(0.7, 0.1))), ones, g).value == 0.0);

    ContrastMap board(4, CVector(16));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) board.values[i * 4 + j] = ((i + j) % 2) ? 1.0 : -1.0;
    Eigen::VectorXd eta(16);
    for (int p = 0; p < 16; ++p) eta[p] = 0.5 + 0.1 * p;
    // direct summation over horizontal and vertical neighbours
    const double d = g.cell_size();
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const int p = i * 4 + j;
        if (j < 3) sum += std::norm(eta[p] * (board.values[p + 1] - board.values[p]) / d);
        if (i < 3) sum += std::norm(eta[p] * (board.values[p + 4] - board.values[p]) / d);
      }
    }
    const double k = 1.0 / 16;
    CHECK(tv_penalty(board, eta, g).value == doctest::Approx(0.5 * k * k * sum).epsilon(1e-14));

    const ContrastMap chi(4, random_matrix(16, 1, 3).col(0));
    const TvPenalty p = tv_penalty(chi, eta, g);
    const CVector dir = random_matrix(16, 1, 4).col(0);
    const double h = 1e-4;
    const double fd = (tv_penalty(ContrastMap(4, chi.values + h * dir), eta, g).value -
                       tv_penalty(ContrastMap(4, chi.values - h * dir), eta, g).value) /
                      (2 * h);
    const double an = p.gradient.dot(dir).real();
    CHECK(std::abs(fd - an) < 1e-6 * std::abs(an));

    const Eigen::VectorXd w = tv_weights(chi, g);
    CHECK(w.minCoeff() > 0.0);
    CHECK(tv_weights(ContrastMap(4, CVector::Zero(16)), g).allFinite());
  }

  TEST_CASE("iterations do not increase the functional") {
    const Small s;
    for (CsiModel m : {CsiModel::h02, CsiModel::y0}) {
      const CsiProblem pb = make_csi_problem(m, s.sol.scattered.values, s.ops, s.setup);
      CsiState st = initial_state(pb);
      CsiOptions o;
      o.max_iterations = 100;
      o.tolerance = 0.0;
      const InversionResult r = csi_iterate(st, pb, o);
      REQUIRE(r.history.size() == 101);
      for (std::size_t i = 1; i < r.history.size(); ++i) {
        REQUIRE(r.history[i].phi <= r.history[i - 1].phi * (1 + 1e-12));
      }
      const CsiTerms t = csi_functional(st.W, st.chi, pb);
      CHECK(t.phi == doctest::Approx(st.phi).epsilon(1e-12));
    }
  }

  TEST_CASE("deterministic") {
    const Small s;
    CsiOptions o;
    o.max_iterations = 20;
    const InversionResult a = run_csi(CsiModel::y0, s.sol.scattered.values, s.ops, s.setup, o);
    const InversionResult b = run_csi(CsiModel::y0, s.sol.scattered.values, s.ops, s.setup, o);
    CHECK((a.chi.values - b.chi.values).norm() == 0.0);
  }

  TEST_CASE("passivity projection") {
    const Small s;
    CsiOptions o;
    o.max_iterations = 30;
    o.passivity = true;
    const InversionResult r = run_csi(CsiModel::h02, s.sol.scattered.values, s.ops, s.setup, o);
    CHECK(r.chi.values.real().minCoeff() >= 0.0);
    CHECK(r.chi.values.imag().maxCoeff() <= 0.0);
  }

  TEST_CASE("noiseless disc converges") {
    const double side = 1.0;
    const Grid fine(side, 40), coarse(side, 20);
    const auto setup = make_setup(kFreq, 3.0, 16, 16, side);
    const Phantom disc = make_circle({0.0, 0.0}, 0.4, 0.5);
    const ForwardSolution sol = solve_forward(rasterize(disc, fine), fine, setup);
    const ContrastMap truth = rasterize(disc, coarse);
    CsiOptions o;
    o.max_iterations = 512;
    o.truth = &truth;
    const InversionResult r =
        run_csi(CsiModel::h02, sol.scattered.values, assemble(coarse, setup), setup, o);
    MESSAGE("disc NMSE " << *r.nmse << " after " << r.iterations << " iterations");
    CHECK(*r.nmse < 0.1);
  }

  TEST_CASE("divergence guard") {
    const Small s;
    CsiProblem pb = make_csi_problem(CsiModel::h02, s.sol.scattered.values, s.ops, s.setup);
    CsiState st = initial_state(pb);
    pb.data(0, 0) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CsiOptions o;
    o.max_iterations = 5;
    CHECK_THROWS_AS(csi_iterate(st, pb, o), std::runtime_error);
    CHECK_THROWS_AS(make_csi_problem(CsiModel::h02, CMatrix::Zero(8, 3), s.ops, s.setup),
                    std::invalid_argument);
  }
}
