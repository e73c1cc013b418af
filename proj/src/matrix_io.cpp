#include "y0scat/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace y0scat {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void export_matrix(const MatrixFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "# " << file.values.rows() << ' ' << file.values.cols() << ' ' << g17(file.side_length) << ' '
      << g17(file.wavelength) << '\n';
  for (Eigen::Index i = 0; i < file.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < file.values.cols(); ++j) {
      if (j) out << ' ';
      out << g17(file.values(i, j).real()) << ' ' << g17(file.values(i, j).imag());
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

MatrixFile import_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
  };
  if (!next_line()) fail("missing header");
  MatrixFile file;
  long rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    std::string hash;
    if (!(hs >> hash) || hash != "#" || !(hs >> rows >> cols >> file.side_length >> file.wavelength) || rows < 0 || cols < 0) {
      fail("malformed header");
    }
  }
  file.values.resize(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!next_line()) fail("expected " + std::to_string(rows) + " data rows");
    std::istringstream ls(line);
    for (long j = 0; j < cols; ++j) {
      double re, im;
      if (!(ls >> re >> im)) fail("expected " + std::to_string(cols) + " complex values");
      file.values(i, j) = cplx(re, im);
    }
    std::string extra;
    if (ls >> extra) fail("trailing values");
  }
  if (next_line()) fail("unexpected extra row");
  return file;
}

CMatrix to_matrix(const ContrastMap& chi) {
  CMatrix m(chi.n, chi.n);
  for (int i = 0; i < chi.n; ++i) {
    for (int j = 0; j < chi.n; ++j) m(i, j) = chi.values[i * chi.n + j];
  }
  return m;
}

ContrastMap from_matrix(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("contrast matrix must be square");
  const int n = static_cast<int>(m.rows());
  ContrastMap chi(n, CVector(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) chi.values[i * n + j] = m(i, j);
  }
  return chi;
}

}  // namespace y0scat
