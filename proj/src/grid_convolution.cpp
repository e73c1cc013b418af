#include "y0scat/grid_convolution.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace y0scat {

namespace {

// FFTW planning is not thread-safe; plans are created once per padded size
// and shared. Execution through fftw_execute_dft is re-entrant.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(int pad) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(pad);
  if (it != cache.end()) return it->second;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * pad * pad));
  PlanPair p;
  p.forward = fftw_plan_dft_2d(pad, pad, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_2d(pad, pad, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(buf);
  cache.emplace(pad, p);
  return p;
}

struct FftBuffer {
  explicit FftBuffer(int count)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))), size(count) {
    if (!data) throw std::bad_alloc();
  }
  ~FftBuffer() { fftw_free(data); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  cplx* ptr() { return reinterpret_cast<cplx*>(data); }

  fftw_complex* data;
  int size;
};

}  // namespace

struct GridConvolution::Spectrum {
  int pad = 0;
  PlanPair plans;
  std::vector<cplx> values;
};

GridConvolution::GridConvolution(int n, CMatrix offsets) : n_(n), offsets_(std::move(offsets)) {
  if (n < 1 || offsets_.rows() != 2 * n - 1 || offsets_.cols() != 2 * n - 1) {
    throw std::invalid_argument("GridConvolution: offset table must be (2n-1) x (2n-1)");
  }
  auto spec = std::make_shared<Spectrum>();
  spec->pad = 2 * n;
  spec->plans = plans_for(spec->pad);
  const int pad = spec->pad;
  FftBuffer buf(pad * pad);
  cplx* c = buf.ptr();
  std::fill(c, c + pad * pad, cplx{0.0, 0.0});
  for (int di = -(n - 1); di <= n - 1; ++di) {
    for (int dj = -(n - 1); dj <= n - 1; ++dj) {
      const int r = (di + pad) % pad;
      const int s = (dj + pad) % pad;
      c[r * pad + s] = offsets_(di + n - 1, dj + n - 1);
    }
  }
  fftw_execute_dft(spec->plans.forward, buf.data, buf.data);
  const double scale = 1.0 / (static_cast<double>(pad) * pad);
  spec->values.assign(c, c + pad * pad);
  for (cplx& v : spec->values) v *= scale;
  spectrum_ = std::move(spec);
}

GridConvolution GridConvolution::from_kernel(int n, const std::function<cplx(int, int)>& kernel) {
  CMatrix table(2 * n - 1, 2 * n - 1);
  for (int di = -(n - 1); di <= n - 1; ++di) {
    for (int dj = -(n - 1); dj <= n - 1; ++dj) {
      table(di + n - 1, dj + n - 1) = kernel(di, dj);
    }
  }
  return GridConvolution(n, std::move(table));
}

cplx GridConvolution::entry(int p, int q) const {
  const int di = p / n_ - q / n_;
  const int dj = p % n_ - q % n_;
  return offsets_(di + n_ - 1, dj + n_ - 1);
}

CVector GridConvolution::apply(const CVector& x) const {
  if (x.size() != size()) throw std::invalid_argument("GridConvolution::apply: size mismatch");
  const int pad = spectrum_->pad;
  FftBuffer buf(pad * pad);
  cplx* b = buf.ptr();
  std::fill(b, b + pad * pad, cplx{0.0, 0.0});
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) b[i * pad + j] = x[i * n_ + j];
  }
  fftw_execute_dft(spectrum_->plans.forward, buf.data, buf.data);
  const cplx* k = spectrum_->values.data();
  for (int i = 0; i < pad * pad; ++i) b[i] *= k[i];
  fftw_execute_dft(spectrum_->plans.backward, buf.data, buf.data);
  CVector y(size());
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) y[i * n_ + j] = b[i * pad + j];
  }
  return y;
}

CVector GridConvolution::apply_adjoint(const CVector& x) const {
  return apply(CVector(x.conjugate())).conjugate();
}

CMatrix GridConvolution::apply(const CMatrix& x) const {
  CMatrix y(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) y.col(c) = apply(CVector(x.col(c)));
  return y;
}

CMatrix GridConvolution::dense() const {
  CMatrix a(size(), size());
  for (int p = 0; p < size(); ++p) {
    for (int q = 0; q < size(); ++q) a(p, q) = entry(p, q);
  }
  return a;
}

GridConvolution GridConvolution::operator-(const GridConvolution& other) const {
  if (other.n_ != n_) throw std::invalid_argument("GridConvolution: grid mismatch");
  return GridConvolution(n_, offsets_ - other.offsets_);
}

GridConvolution GridConvolution::operator+(const GridConvolution& other) const {
  if (other.n_ != n_) throw std::invalid_argument("GridConvolution: grid mismatch");
  return GridConvolution(n_, offsets_ + other.offsets_);
}

LinearMap as_linear_map(const CMatrix& a) {
  return {static_cast<int>(a.rows()), static_cast<int>(a.cols()),
          [a](const CVector& x) -> CVector { return a * x; },
          [a](const CVector& x) -> CVector { return a.adjoint() * x; }};
}

LinearMap as_linear_map(const GridConvolution& a) {
  return {a.size(), a.size(), [a](const CVector& x) { return a.apply(x); },
          [a](const CVector& x) { return a.apply_adjoint(x); }};
}

LinearMap masked(const GridConvolution& a, const std::vector<bool>& mask) {
  if (static_cast<int>(mask.size()) != a.size()) {
    throw std::invalid_argument("masked: mask size mismatch");
  }
  auto project = [mask](CVector v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!mask[i]) v[i] = 0.0;
    }
    return v;
  };
  return {a.size(), a.size(), [a, project](const CVector& x) { return project(a.apply(project(x))); },
          [a, project](const CVector& x) { return project(a.apply_adjoint(project(x))); }};
}

}  // namespace y0scat
