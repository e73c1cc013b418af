#pragma once

#include <string>

#include "y0scat/scene.hpp"

namespace y0scat {

struct MatrixFile {
  CMatrix values;
  double side_length = 0.0;  // L, metres
  double wavelength = 0.0;   // background wavelength, metres
};

// Text format, one header line then one line per row:
//   # <rows> <cols> <L> <lambda_b>
//   re im re im ...
// Numbers are written with 17 significant digits so import is bit-exact.
void export_matrix(const MatrixFile& file, const std::string& path);
MatrixFile import_matrix(const std::string& path);

// Grid-ordered contrast to a rows x cols matrix (row index = y).
CMatrix to_matrix(const ContrastMap& chi);
ContrastMap from_matrix(const CMatrix& m);

}  // namespace y0scat
