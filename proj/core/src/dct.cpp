#include "vitprobe/dct.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vitprobe/error.hpp"

namespace vitprobe {

namespace {

// First `count` rows of the n-point DCT-II basis.
Matrix basis_rows(std::size_t n, std::size_t count) {
  Matrix b(count, n);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < count; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    for (std::size_t j = 0; j < n; ++j) {
      b(k, j) = scale * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * dn));
    }
  }
  return b;
}

void require_nonempty(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) raise(ErrorKind::DimensionError, "DCT input must be at least 1x1");
}

}  // namespace

Matrix dct_basis(std::size_t n) {
  if (n == 0) raise(ErrorKind::DimensionError, "DCT size must be positive");
  return basis_rows(n, n);
}

Matrix dct2(const Matrix& x) {
  require_nonempty(x);
  const Matrix bm = dct_basis(x.rows());
  const Matrix bn = dct_basis(x.cols());
  return bm * x * bn.transpose();
}

Matrix idct2(const Matrix& coeffs) {
  require_nonempty(coeffs);
  const Matrix bm = dct_basis(coeffs.rows());
  const Matrix bn = dct_basis(coeffs.cols());
  return bm.transpose() * coeffs * bn;
}

std::vector<double> compress_patch_grid(const Matrix& grid, const CompressionShape& shape) {
  if (static_cast<std::size_t>(grid.rows()) != shape.rows || static_cast<std::size_t>(grid.cols()) != shape.cols) {
    raise(ErrorKind::DimensionError, "patch grid is " + std::to_string(grid.rows()) + "x" +
                                         std::to_string(grid.cols()) + ", expected " + std::to_string(shape.rows) +
                                         "x" + std::to_string(shape.cols));
  }
  if (shape.block == 0 || shape.block > shape.rows || shape.block > shape.cols) {
    raise(ErrorKind::DimensionError, "block size " + std::to_string(shape.block) + " does not fit the grid");
  }
  const Matrix bm = basis_rows(shape.rows, shape.block);
  const Matrix bn = basis_rows(shape.cols, shape.block);
  const Matrix top = bm * grid * bn.transpose();
  return {top.data(), top.data() + top.size()};
}

}  // namespace vitprobe
