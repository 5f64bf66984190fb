// SPDX-License-Identifier: Apache-2.0
#include "lqomor/matrix_market.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lqomor {

std::string fmt17(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw shape_error("matrix market (" + context + "): " + what);
}

}  // namespace

Matrix read_matrix_market(std::istream& in, const std::string& context) {
  std::string header;
  if (!std::getline(in, header)) fail(context, "empty file");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
    fail(context, "missing %%MatrixMarket banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer") {
    fail(context, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" &&
      symmetry != "skew-symmetric") {
    fail(context, "unsupported symmetry '" + symmetry + "'");
  }

  std::string line;
  do {
    if (!std::getline(in, line)) fail(context, "missing size line");
  } while (line.empty() || line[0] == '%');

  std::istringstream sizes(line);
  if (format == "array") {
    Index rows = 0, cols = 0;
    sizes >> rows >> cols;
    if (rows <= 0 || cols <= 0) fail(context, "bad dimensions");
    Matrix A(rows, cols);
    // Array format lists entries column by column; symmetric variants store
    // only the lower triangle.
    for (Index j = 0; j < cols; ++j) {
      Index i0 = (symmetry == "general") ? 0 : (symmetry == "symmetric" ? j : j + 1);
      if (symmetry == "skew-symmetric") A(j, j) = 0.0;
      for (Index i = i0; i < rows; ++i) {
        double v;
        if (!(in >> v)) fail(context, "too few entries");
        A(i, j) = v;
        if (symmetry == "symmetric") A(j, i) = v;
        if (symmetry == "skew-symmetric") A(j, i) = -v;
      }
    }
    require_finite(A, "matrix market");
    return A;
  }
  if (format == "coordinate") {
    Index rows = 0, cols = 0;
    long long nnz = -1;
    sizes >> rows >> cols >> nnz;
    if (rows <= 0 || cols <= 0 || nnz < 0) fail(context, "bad dimensions");
    Matrix A = Matrix::Zero(rows, cols);
    for (long long k = 0; k < nnz; ++k) {
      Index i, j;
      double v;
      if (!(in >> i >> j >> v)) fail(context, "too few entries");
      if (i < 1 || i > rows || j < 1 || j > cols) fail(context, "index out of range");
      A(i - 1, j - 1) = v;
      if (symmetry == "symmetric" && i != j) A(j - 1, i - 1) = v;
      if (symmetry == "skew-symmetric" && i != j) A(j - 1, i - 1) = -v;
    }
    require_finite(A, "matrix market");
    return A;
  }
  fail(context, "unsupported format '" + format + "'");
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw shape_error("matrix market: cannot open " + path);
  return read_matrix_market(in, path);
}

void write_matrix_market(std::ostream& out, const Matrix& A) {
  out << "%%MatrixMarket matrix array real general\n";
  out << A.rows() << " " << A.cols() << "\n";
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      out << fmt17(A(i, j)) << "\n";
    }
  }
}

void write_matrix_market(const std::string& path, const Matrix& A) {
  std::ofstream out(path);
  if (!out) throw shape_error("matrix market: cannot open " + path + " for writing");
  write_matrix_market(out, A);
}

}  // namespace lqomor
