#include "y0scat/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace y0scat {

namespace {

namespace bm = boost::math;
using Policy = bm::policies::policy<bm::policies::overflow_error<bm::policies::ignore_error>,
                                    bm::policies::underflow_error<bm::policies::ignore_error>,
                                    bm::policies::promote_double<false>>;

inline double parity(int n) { return (n & 1) ? -1.0 : 1.0; }

}  // namespace

double bessel_j(int n, double x) {
  if (x < 0.0 || std::isnan(x)) {
    throw std::domain_error("bessel_j: argument must be non-negative, got " + std::to_string(x));
  }
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const int m = n < 0 ? -n : n;
  const double v = bm::cyl_bessel_j(m, x, Policy());
  return n < 0 ? parity(m) * v : v;
}

double bessel_y(int n, double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("bessel_y: argument must be positive, got " + std::to_string(x));
  }
  const int m = n < 0 ? -n : n;
  double v = bm::cyl_neumann(m, x, Policy());
  if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
  return n < 0 ? parity(m) * v : v;
}

std::complex<double> hankel2(int n, double x) { return {bessel_j(n, x), -bessel_y(n, x)}; }

}  // namespace y0scat
