#pragma once

#include <functional>
#include <memory>

#include "y0scat/scene.hpp"

namespace y0scat {

// Block-Toeplitz operator on an n x n cell grid whose entries depend only on
// the row/column offset between two cells. Applied by zero-padded FFT
// convolution; the dense matrix is never formed unless asked for.
class GridConvolution {
 public:
  GridConvolution() = default;
  // offsets(di + n - 1, dj + n - 1) is the coupling for a row offset di and
  // column offset dj, both in [-(n-1), n-1]. The kernel must be even
  // (offsets(d) == offsets(-d)) so that the operator is complex symmetric.
  GridConvolution(int n, CMatrix offsets);

  // Tabulates kernel(di, dj) over every offset.
  static GridConvolution from_kernel(int n, const std::function<cplx(int, int)>& kernel);

  int n() const { return n_; }
  int size() const { return n_ * n_; }
  const CMatrix& offsets() const { return offsets_; }

  cplx entry(int p, int q) const;
  CVector apply(const CVector& x) const;
  // A^H x; relies on A^T = A.
  CVector apply_adjoint(const CVector& x) const;
  CMatrix apply(const CMatrix& x) const;
  CMatrix dense() const;

  GridConvolution operator-(const GridConvolution& other) const;
  GridConvolution operator+(const GridConvolution& other) const;

 private:
  struct Spectrum;
  int n_ = 0;
  CMatrix offsets_;
  std::shared_ptr<const Spectrum> spectrum_;
};

// Matrix-free linear map with its adjoint.
struct LinearMap {
  int rows = 0;
  int cols = 0;
  std::function<CVector(const CVector&)> apply;
  std::function<CVector(const CVector&)> apply_adjoint;
};

LinearMap as_linear_map(const CMatrix& a);
LinearMap as_linear_map(const GridConvolution& a);
// diag(mask) * A * diag(mask)
LinearMap masked(const GridConvolution& a, const std::vector<bool>& mask);

}  // namespace y0scat
